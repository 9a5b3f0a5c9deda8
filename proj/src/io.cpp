#include "bsl/io.hpp"

#include "bsl/errors.hpp"

#include <fstream>

namespace bsl::io {

namespace {

std::vector<int> one_based(const std::vector<int>& v)
{
    std::vector<int> r(v);
    for (int& x : r) ++x;
    return r;
}

std::vector<int> zero_based(const json& a, const char* what)
{
    if (!a.is_array()) throw ConfigError(std::string(what) + " must be an array");
    std::vector<int> r;
    for (const auto& x : a) {
        if (!x.is_number_integer()) throw ConfigError(std::string(what) + " entries must be integers");
        r.push_back(x.get<int>() - 1);
    }
    return r;
}

} // namespace

json to_json(const Combinatorics& c)
{
    return json{{"N", c.N}, {"zeta", one_based(c.zeta)}, {"iota", one_based(c.iota)}};
}

Combinatorics combinatorics_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("N")) throw ConfigError("combinatorics JSON needs N");
    const int N = j.at("N").get<int>();
    if (!j.contains("iota")) return canonical_rotation_combinatorics(N);
    std::vector<int> zeta;
    if (j.contains("zeta")) {
        zeta = zero_based(j.at("zeta"), "zeta");
    } else {
        for (int i = 0; i < 2 * N; ++i) zeta.push_back((i + 1) % (2 * N));
    }
    return build_combinatorics(N, zeta, zero_based(j.at("iota"), "iota"));
}

json to_json(const CircleMap& m)
{
    return json{{"comb", to_json(m.comb())},
                {"lambda", m.lambda_str()},
                {"z", m.z_str()},
                {"c", m.c_str()},
                {"precision_bits", m.precision()}};
}

CircleMap map_from_json(const json& j)
{
    for (const char* key : {"comb", "lambda", "z", "c"})
        if (!j.contains(key)) throw ConfigError(std::string("map JSON needs ") + key);
    mpfr_prec_t bits = j.value("precision_bits", static_cast<long>(default_precision()));
    return CircleMap(combinatorics_from_json(j.at("comb")), j.at("lambda").get<std::string>(),
                     j.at("z").get<std::vector<std::string>>(),
                     j.at("c").get<std::vector<std::string>>(), bits);
}

json to_json(const ValidationReport& r)
{
    json out = json::object();
    out["ok"] = r.ok();
    json conds = json::array();
    for (const auto& c : r.conditions) {
        json e{{"name", c.name}, {"pass", c.pass}};
        if (!c.pass) e["witness"] = c.witness;
        if (!c.warnings.empty()) e["warnings"] = c.warnings;
        conds.push_back(e);
    }
    out["conditions"] = conds;
    json orbits = json::array();
    for (const auto& o : r.orbits) {
        json e{{"j", o.j + 1}, {"host", o.host + 1}, {"merge_step", o.merge_step}};
        e["merge_point"] = CirclePoint(o.merge_point).to_string(30);
        orbits.push_back(e);
    }
    out["orbits"] = orbits;
    return out;
}

json read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace bsl::io
