#include "bsl/pipeline.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <random>

namespace bsl::pipeline {

namespace {

constexpr int kDigits = 30;

std::string s30(const Scalar& x) { return x.to_string(kDigits); }

json sizes_json(const std::vector<std::uint64_t>& v)
{
    json a = json::array();
    for (auto x : v) a.push_back(x);
    return a;
}

json doubles_json(const std::vector<double>& v)
{
    json a = json::array();
    for (double x : v) a.push_back(dec(x));
    return a;
}

void fail(StageReport& r, const std::string& what)
{
    if (r.pass) r.failure = what;
    r.pass = false;
}

std::vector<int> zero_based_word(const RunConfig& c, int n)
{
    std::vector<int> w;
    for (int x : c.word) {
        if (x < 1 || x > n) throw ConfigError("word letter " + std::to_string(x) + " outside 1.." + std::to_string(n));
        w.push_back(x - 1);
    }
    return w;
}

json dilatation_json(const Dilatation& d)
{
    json e{{"word", word_json(d.word)},
           {"lo", s30(d.lo)},
           {"hi", s30(d.hi)},
           {"slope", s30(d.slope)},
           {"secant", s30(d.secant)},
           {"expression_count", d.expression_count},
           {"merged", d.merged},
           {"encloses", d.encloses}};
    json ex = json::array();
    for (const auto& w : d.expressions) ex.push_back(word_json(w));
    e["expressions"] = ex;
    return e;
}

json euler_json(const EulerReport& e)
{
    return json{{"radius", e.radius}, {"V", e.V},       {"E", e.E},
                {"F", e.F},           {"chi", e.chi},   {"genus", e.genus},
                {"moves", e.moves},   {"unmatched_faces", e.unmatched_faces},
                {"warning", e.warning}};
}

} // namespace

std::string dec(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json word_json(const std::vector<int>& w)
{
    json a = json::array();
    for (int x : w) a.push_back(x + 1);
    return a;
}

json config_json(const RunConfig& c)
{
    json j{{"canonical", c.canonical},
           {"comb_file", c.comb_file},
           {"map_file", c.map_file},
           {"precision_bits", c.precision_bits},
           {"epsilon", dec(c.epsilon)},
           {"oe_precision_bits", c.oe_precision_bits},
           {"levels", c.levels},
           {"radius", c.radius},
           {"euler_radius", c.euler_radius},
           {"samples", c.samples},
           {"seed", c.seed},
           {"grid", c.grid},
           {"bound", c.bound},
           {"max_word_length", c.max_word_length},
           {"profile_j", c.profile_j},
           {"fault_j", c.fault_j},
           {"word", c.word}};
    return j;
}

json envelope(const RunConfig& c, const StageReport& r)
{
    json e{{"tool", "bsl"},
           {"version", kToolVersion},
           {"stage", r.stage},
           {"config", config_json(c)},
           {"precision",
            {{"working_bits", c.precision_bits},
             {"orbit_equivalence_bits", c.oe_precision_bits},
             {"epsilon", dec(c.epsilon)},
             {"decimal_digits", kDigits}}},
           {"pass", r.pass}};
    if (!r.pass) e["failure"] = r.failure;
    e["result"] = r.result;
    return e;
}

// ---------------------------------------------------------------- context

Context::Context(RunConfig cfg) : cfg_(std::move(cfg))
{
    if (cfg_.precision_bits < 64) throw ConfigError("precision_bits must be >= 64");
    if (cfg_.oe_precision_bits < cfg_.precision_bits) throw ConfigError("oe precision below working precision");
    if (!(cfg_.epsilon > 0)) throw ConfigError("epsilon must be positive");
    if (cfg_.levels < 1 || cfg_.radius < 1 || cfg_.euler_radius < 1) throw ConfigError("levels and radii must be >= 1");
    if (cfg_.samples < 1 || cfg_.grid < 2 || cfg_.bound < 1 || cfg_.max_word_length < 1)
        throw ConfigError("samples, grid, bound and word length must be positive");
    set_default_precision(cfg_.precision_bits);
    set_default_epsilon(cfg_.epsilon);
}

const Combinatorics& Context::comb()
{
    if (!comb_) {
        if (!cfg_.map_file.empty())
            comb_ = map().comb();
        else if (!cfg_.comb_file.empty())
            comb_ = io::combinatorics_from_json(io::read_file(cfg_.comb_file));
        else
            comb_ = canonical_rotation_combinatorics(cfg_.canonical);
    }
    return *comb_;
}

const SolverResult& Context::solved()
{
    if (!solved_) {
        SolverOptions opt;
        opt.precision_bits = cfg_.precision_bits;
        solved_ = solve_even_model(comb(), opt);
    }
    return *solved_;
}

const CircleMap& Context::map()
{
    if (!map_) {
        if (!cfg_.map_file.empty())
            map_ = io::map_from_json(io::read_file(cfg_.map_file));
        else
            map_ = solved().map;
    }
    return *map_;
}

const GeneratorFamily& Context::family()
{
    if (!fam_) fam_ = build_generators(map());
    return *fam_;
}

const CircleMap& Context::fine_map()
{
    if (!fine_map_) fine_map_ = map().at_precision(cfg_.oe_precision_bits);
    return *fine_map_;
}

const GeneratorFamily& Context::fine_family()
{
    if (!fine_fam_) fine_fam_ = build_generators(fine_map());
    return *fine_fam_;
}

// ---------------------------------------------------------------- stages

StageReport combi_check(Context& ctx)
{
    StageReport r{"combi_check"};
    auto check = [&](const Combinatorics& c, const std::string& tag) {
        auto res = verify_permutation_identities(c);
        json e{{"instance", tag}, {"combinatorics", io::to_json(c)}, {"identities", res.size()}};
        for (const auto& x : res)
            if (!x.pass) {
                fail(r, tag + " " + x.name + ": " + x.witness);
                e["failed"] = x.name;
            }
        return e;
    };
    json inst = json::array();
    inst.push_back(check(ctx.comb(), "input"));
    std::mt19937_64 rng(ctx.config().seed);
    const int count = std::min(ctx.config().samples, 50);
    for (int i = 0; i < count; ++i) {
        const int N = 4 + static_cast<int>(rng() % 5);
        inst.push_back(check(random_combinatorics(N, rng), "random " + std::to_string(i)));
    }
    r.result["instances"] = inst;
    return r;
}

StageReport map_validate(const RunConfig& c, const CircleMap& m)
{
    StageReport r{"map_validate"};
    ValidationReport v = validate_conditions(m);
    for (const auto& x : v.conditions)
        if (!x.pass) fail(r, x.name + ": " + x.witness);
    r.result["precision_bits"] = m.precision();
    r.result["validation"] = io::to_json(v);
    if (m.precision() < c.precision_bits) fail(r, "map precision below the requested working precision");
    return r;
}

StageReport map_solve(Context& ctx)
{
    const SolverResult& s = ctx.solved();
    StageReport r = map_validate(ctx.config(), s.map);
    r.stage = "map_solve";
    r.result["map"] = io::to_json(s.map);
    r.result["lambda"] = s30(s.lambda);
    r.result["residual"] = dec(s.residual);
    r.result["offset_interval"] = {s30(s.t_lo), s30(s.t_hi)};
    if (s.map.precision() < 256) fail(r, "working precision below 256 bits");
    ValidationReport v = validate_conditions(s.map);
    for (const auto& o : v.orbits) {
        const int expect = s.map.comb().k(o.j) - 1;
        if (o.merge_step != expect)
            fail(r, "EC merge at z_" + std::to_string(o.j + 1) + " after " + std::to_string(o.merge_step) +
                        " steps, expected " + std::to_string(expect));
    }
    return r;
}

StageReport map_markovize(Context& ctx)
{
    StageReport r{"map_markovize"};
    CircleMap mm = markovize(ctx.map());
    r.result["map"] = io::to_json(mm);
    MarkovPartition mp = markov_partition(mm);
    r.result["partition_size"] = mp.points.size();
    ValidationReport v = validate_conditions(mm);
    r.result["validation"] = io::to_json(v);
    for (const auto& x : v.conditions)
        if (!x.pass) fail(r, x.name + ": " + x.witness);
    return r;
}

StageReport map_perron(Context& ctx)
{
    StageReport r{"map_perron"};
    const Scalar lambda = ctx.map().lambda();
    PerronData pd = perron_data(markovize(ctx.map()));
    const double rel = pd.spectral_radius.width_d() / pd.spectral_radius.mid_d();
    const bool encl = pd.spectral_radius.contains(lambda.mid());
    r.result["lambda"] = s30(lambda);
    r.result["spectral_radius"] = {{"mid", s30(pd.spectral_radius)}, {"width", dec(pd.spectral_radius.width_d())}};
    r.result["relative_width"] = dec(rel);
    r.result["encloses_lambda"] = encl;
    r.result["iterations"] = pd.iterations;
    r.result["matrix_size"] = pd.transition_matrix.size();
    r.result["transition_matrix"] = pd.transition_matrix;
    if (!encl) fail(r, "Perron root does not enclose lambda");
    if (!(rel <= 1e-10)) fail(r, "Perron root relative width " + dec(rel) + " exceeds 1e-10");
    return r;
}

StageReport gens_build(Context& ctx)
{
    StageReport r{"gens_build"};
    const GeneratorFamily& f = ctx.family();
    r.result["arc"] = s30(f.arc);
    json g = json::array();
    for (const auto& x : f.gens)
        g.push_back({{"j", x.j + 1},
                     {"n_minus", s30(x.n_minus)},
                     {"n_plus", s30(x.n_plus)},
                     {"r0", s30(x.r0)},
                     {"pieces",
                      {{{"lo", s30(x.n_minus)}, {"hi", s30(x.n_plus)}, {"slope", "lambda"}},
                       {{"lo", s30(x.n_plus)}, {"hi", s30(x.n_minus)}, {"slope", "1/lambda"}}}}});
    r.result["generators"] = g;
    json rel = json::array();
    for (const auto& x : f.relations)
        rel.push_back({{"j", x.j + 1}, {"lhs", word_json(x.lhs)}, {"rhs", word_json(x.rhs)}});
    r.result["relations"] = rel;
    r.result["p"] = f.ext.p;
    r.result["q"] = f.ext.q;
    return r;
}

StageReport gens_verify_cp(Context& ctx)
{
    StageReport r{"gens_verify_cp"};
    const RunConfig& c = ctx.config();
    const GeneratorFamily& f = ctx.family();
    const int n = ctx.map().n();
    if (c.fault_j < 1 || c.fault_j > n) throw ConfigError("fault generator outside 1.." + std::to_string(n));
    json res = json::array();
    double worst = 0;
    for (int j = 0; j < n; ++j) {
        const double e = verify_cp_relation(f, j, c.grid).upper_d();
        worst = std::max(worst, e);
        res.push_back({{"j", j + 1}, {"residual", dec(e)}});
        if (!(e < 1e-12)) fail(r, "relation at z_" + std::to_string(j + 1) + " residual " + dec(e));
    }
    r.result["grid"] = c.grid;
    r.result["residuals"] = res;
    r.result["max_residual"] = dec(worst);
    GeneratorOptions opt;
    opt.fault_j = c.fault_j - 1;
    GeneratorFamily bad = build_generators(ctx.map(), opt);
    double fault = 0;
    for (int j = 0; j < n; ++j) fault = std::max(fault, verify_cp_relation(bad, j, c.grid).upper_d());
    r.result["fault_probe"] = {{"smoothed_generator", c.fault_j}, {"max_residual", dec(fault)}};
    if (!(fault > 1e-6)) fail(r, "smoothed family residual " + dec(fault) + " not above 1e-6");
    return r;
}

StageReport gens_profile(Context& ctx)
{
    StageReport r{"gens_profile"};
    const int j = ctx.config().profile_j - 1;
    if (j < 0 || j >= ctx.map().n()) throw ConfigError("profile generator outside 1.." + std::to_string(ctx.map().n()));
    ProfileReport p = verify_partition_profile(ctx.family(), j);
    json pieces = json::array();
    for (const auto& x : p.pieces) pieces.push_back({{"lo", s30(x.lo)}, {"hi", s30(x.hi)}, {"exponent", x.exponent}});
    json kinks = json::array();
    for (const auto& k : p.kinks) kinks.push_back(s30(k));
    r.result = {{"j", j + 1},
                {"pieces", pieces},
                {"kinks", kinks},
                {"max_mismatch", dec(p.max_mismatch)},
                {"contains_W", p.contains_W}};
    if (!p.contains_W) fail(r, "first piece misses W");
    return r;
}

StageReport graph_structure(Context& ctx)
{
    StageReport r{"graph_structure"};
    const Combinatorics& cb = ctx.map().comb();
    ConeAutomaton A(ctx.map());
    StructureReport s = scan_structure(A, ctx.config().levels);
    std::vector<bool> cyc = s.sphere_cycle;
    r.result = {{"levels", s.levels},
                {"gamma0_sizes", sizes_json(s.gamma0_sizes)},
                {"dyn_sizes", sizes_json(s.dyn_sizes)},
                {"sphere_cycle", cyc},
                {"interior_vertices", s.interior_vertices},
                {"min_valency", s.min_valency},
                {"max_valency", s.max_valency},
                {"bad_valency", s.bad_valency},
                {"iiv_count", s.iiv_count},
                {"iie_count", s.iie_count},
                {"iiv_bad_indegree", s.iiv_bad_indegree},
                {"max_multiplicity", s.max_multiplicity},
                {"first_iiv_level", s.first_iiv_level},
                {"expected_first_iiv_level", cb.k_min()}};
    for (int k = 0; k < static_cast<int>(cyc.size()); ++k)
        if (!cyc[k]) fail(r, "sphere " + std::to_string(k) + " of gamma0 is not a single cycle");
    if (s.bad_valency != 0 || s.min_valency != cb.n() || s.max_valency != cb.n())
        fail(r, "interior valency outside 2N: " + s.witness);
    if (s.iiv_bad_indegree != 0) fail(r, "TypeIIv in-degree differs from 2: " + s.witness);
    if (!s.ok(cb.n())) fail(r, "structure scan: " + s.witness);
    if (s.levels >= cb.k_min() && s.first_iiv_level != cb.k_min())
        fail(r, "first merges at level " + std::to_string(s.first_iiv_level));
    return r;
}

StageReport graph_growth(Context& ctx)
{
    StageReport r{"graph_growth"};
    const CircleMap& m = ctx.map();
    ConeAutomaton A(m);
    LevelCounts lc = count_levels(A, ctx.config().levels);
    GrowthReport dyn = sphere_growth(lc.dyn), tree = sphere_growth(lc.gamma0);
    const double lam = m.lambda().mid_d();
    const double gap = std::abs(dyn.estimate - lam) / lam;
    const std::uint64_t two_n_minus_1 = static_cast<std::uint64_t>(m.n() - 1);
    bool exact = true;
    for (std::size_t k = 2; k < lc.gamma0.size(); ++k)
        exact = exact && lc.gamma0[k] == lc.gamma0[k - 1] * two_n_minus_1;
    r.result = {{"levels", ctx.config().levels},
                {"lambda", s30(m.lambda())},
                {"dyn_sizes", sizes_json(lc.dyn)},
                {"dyn_ratios", doubles_json(dyn.ratios)},
                {"dyn_estimate", dec(dyn.estimate)},
                {"relative_gap", dec(gap)},
                {"gamma0_sizes", sizes_json(lc.gamma0)},
                {"gamma0_ratios", doubles_json(tree.ratios)},
                {"gamma0_estimate", dec(tree.estimate)},
                {"gamma0_ratio_is_2N_minus_1", exact}};
    if (!(gap < 0.05)) fail(r, "sphere ratio " + dec(dyn.estimate) + " more than 5% from lambda");
    return r;
}

StageReport graph_delta(Context& ctx)
{
    StageReport r{"graph_delta"};
    const int L = std::min(ctx.config().levels, 6);
    ExplicitGraph g = build_dyngraph(ctx.map(), L);
    const double d = hyperbolicity_delta(g, L, 48, ctx.config().seed);
    r.result = {{"levels", L}, {"vertices", g.vertices.size()}, {"edges", g.edges.size()}, {"delta", dec(d)}};
    return r;
}

StageReport action_verify(Context& ctx)
{
    StageReport r{"action_verify"};
    const RunConfig& c = ctx.config();
    DynGraph G(ctx.map(), c.radius + 11);
    GroupAction A(ctx.family(), G);
    ActionReport a = verify_action(A, c.radius, c.samples, c.seed);
    json checks = json::array();
    for (const auto& x : a.checks) {
        checks.push_back({{"name", x.name}, {"pass", x.pass}, {"checked", x.checked}, {"witness", x.witness}});
        if (!x.pass) fail(r, x.name + ": " + x.witness);
    }
    json cases = json::object();
    for (const auto& [k, v] : a.case_counts) cases[k] = v;
    r.result = {{"radius", a.radius},
                {"max_level", G.max_level()},
                {"samples", a.samples},
                {"ball_size", a.ball_size},
                {"checks", checks},
                {"case_counts", cases}};
    return r;
}

StageReport surface_dilate(Context& ctx)
{
    StageReport r{"surface_dilate"};
    const RunConfig& c = ctx.config();
    const GeneratorFamily& f = ctx.family();
    DynGraph G(ctx.map(), c.max_word_length + 10);
    if (!c.word.empty()) {
        Dilatation d = element_dilatation(f, G, zero_based_word(c, ctx.map().n()));
        r.result["words"] = json::array({dilatation_json(d)});
        if (!d.encloses) fail(r, "derivative misses lambda^n");
        return r;
    }
    json words = json::array();
    CylinderTree& T = G.tree();
    std::mt19937_64 rng(c.seed);
    for (int s = 0; s < c.samples; ++s) {
        const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(c.max_word_length));
        int node = T.root();
        for (int l = 0; l < len; ++l) {
            T.expand(node);
            node = T.child(node, static_cast<int>(rng() % static_cast<std::uint64_t>(T.node(node).n_children)));
        }
        Dilatation d = element_dilatation(f, G, T.word(node));
        if (!d.encloses) fail(r, "sample " + std::to_string(s) + " derivative misses lambda^n");
        words.push_back(dilatation_json(d));
    }
    json cp = json::array();
    for (const auto& rel : f.relations)
        for (const auto* w : {&rel.lhs, &rel.rhs}) {
            Dilatation d = element_dilatation(f, G, *w);
            if (d.expression_count != 2)
                fail(r, "relation word at z_" + std::to_string(rel.j + 1) + " has " +
                            std::to_string(d.expression_count) + " expressions");
            if (!d.encloses) fail(r, "relation word at z_" + std::to_string(rel.j + 1) + " misses lambda^n");
            cp.push_back(dilatation_json(d));
        }
    r.result["words"] = words;
    r.result["relation_words"] = cp;
    return r;
}

StageReport surface_entropy(Context& ctx)
{
    StageReport r{"surface_entropy"};
    const int L = ctx.config().levels;
    EntropyReport folded = entropy_compare(ctx.map(), L, true);
    EntropyReport tree = entropy_compare(ctx.map(), L, false);
    r.result = {{"levels", L},
                {"log_lambda", dec(folded.log_lambda)},
                {"graph_growth_log", dec(folded.growth_log)},
                {"graph_relative_gap", dec(folded.relative_gap)},
                {"tree_growth_log", dec(tree.growth_log)},
                {"tree_relative_gap", dec(tree.relative_gap)}};
    if (!(folded.relative_gap < 0.05)) fail(r, "growth exponent more than 5% from log lambda");
    return r;
}

StageReport surface_euler(Context& ctx)
{
    StageReport r{"surface_euler"};
    const int R = ctx.config().euler_radius;
    DynGraph G(ctx.map(), R + 2 + 11);
    GroupAction A(ctx.family(), G);
    json runs = json::array();
    std::vector<EulerReport> reps;
    for (int rad : {R, R + 2}) {
        TwoComplex K = build_2complex(G, rad);
        EulerReport e = quotient_euler(K, A);
        json j = euler_json(e);
        j["links_checked"] = K.links_checked;
        j["links_bad"] = K.links_bad;
        j["edges_checked"] = K.edges_checked;
        j["edges_bad"] = K.edges_bad;
        j["open_loops"] = K.open_loops;
        runs.push_back(j);
        if (K.links_bad || K.edges_bad || K.open_loops) fail(r, "2-complex at R=" + std::to_string(rad) + ": " + K.witness);
        if (e.unmatched_faces) fail(r, "unmatched faces at R=" + std::to_string(rad));
        if (e.genus < 0) fail(r, "no orientable genus for chi=" + std::to_string(e.chi));
        reps.push_back(e);
    }
    if (reps[0].chi != reps[1].chi) fail(r, "chi differs between R and R+2");
    r.result = {{"runs", runs}, {"chi", reps[0].chi}, {"genus", reps[0].genus}};
    return r;
}

json witness_json(const OEWitness& w)
{
    json t = json::array();
    for (const auto& s : w.transcript)
        t.push_back({{"n", s.index}, {"j", s.j + 1}, {"x", dec(s.x)}, {"alt", std::string(1, s.alt)}, {"K", s.K}});
    return json{{"j", w.j + 1},
                {"x", CirclePoint(w.x).to_string(kDigits)},
                {"y", CirclePoint(w.y).to_string(kDigits)},
                {"n", w.n},
                {"m", w.m},
                {"side", std::string(1, w.side)},
                {"mirrored", w.mirrored},
                {"verified", w.verified},
                {"transcript", t}};
}

StageReport oe_fuzz(Context& ctx, std::ostream* transcripts)
{
    StageReport r{"oe_fuzz"};
    const RunConfig& c = ctx.config();
    OEFuzzReport f = fuzz_orbit_equivalence(ctx.fine_map(), ctx.fine_family(), c.samples, c.bound, c.seed);
    r.result = {{"samples", f.samples},
                {"bound", f.bound},
                {"seed", f.seed},
                {"precision_bits", ctx.fine_map().precision()},
                {"neutral_eps", dec(f.neutral_eps)},
                {"pairs", f.pairs},
                {"success", f.success},
                {"excluded", f.excluded},
                {"not_found", f.not_found},
                {"disagreements", f.disagreements},
                {"failures", f.failures},
                {"success_rate", dec(f.success_rate())},
                {"max_nm", f.max_nm},
                {"notes", f.notes}};
    if (f.success_rate() != 1.0) fail(r, "success rate " + dec(f.success_rate()) + (f.notes.empty() ? "" : ": " + f.notes[0]));
    if (transcripts)
        for (const auto& w : f.witnesses) *transcripts << witness_json(w).dump() << '\n';
    return r;
}

} // namespace bsl::pipeline
