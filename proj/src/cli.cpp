#include "bsl/cli.hpp"

#include "bsl/errors.hpp"
#include "bsl/pipeline.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace bsl::cli {

namespace {

namespace fs = std::filesystem;
using pipeline::Context;
using pipeline::RunConfig;
using pipeline::StageReport;

using Stage = std::function<StageReport(Context&)>;

std::vector<int> parse_word(const std::string& s)
{
    std::vector<int> w;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            w.push_back(v);
        } catch (const std::logic_error&) {
            throw ConfigError("bad word letter '" + tok + "'");
        }
    }
    if (w.empty()) throw ConfigError("empty word");
    return w;
}

std::ofstream open_out(const RunConfig& c, const std::string& name)
{
    fs::create_directories(c.out);
    std::ofstream f(fs::path(c.out) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (fs::path(c.out) / name).string());
    return f;
}

void emit(const RunConfig& c, const pipeline::json& j, const std::string& name, std::ostream& out)
{
    if (c.out.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    open_out(c, name + ".json") << j.dump(2) << '\n';
}

int report(const RunConfig& c, const StageReport& r, std::ostream& out, std::ostream& err)
{
    emit(c, pipeline::envelope(c, r), r.stage, out);
    if (r.pass) return 0;
    err << "bsl: stage " << r.stage << " failed: " << r.failure << '\n';
    return 1;
}

struct Pipeline {
    std::string name;
    Stage stage;
};

std::vector<Pipeline> full_pipeline()
{
    return {{"combi_check", pipeline::combi_check},      {"map_solve", pipeline::map_solve},
            {"map_perron", pipeline::map_perron},        {"gens_verify_cp", pipeline::gens_verify_cp},
            {"graph_structure", pipeline::graph_structure}, {"graph_growth", pipeline::graph_growth},
            {"action_verify", pipeline::action_verify},  {"surface_dilate", pipeline::surface_dilate},
            {"surface_entropy", pipeline::surface_entropy}, {"surface_euler", pipeline::surface_euler},
            {"oe_fuzz", [](Context& x) { return pipeline::oe_fuzz(x); }}};
}

int run_all(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    Context ctx(c);
    StageReport all("all");
    pipeline::json stages = pipeline::json::array();
    for (const auto& p : full_pipeline()) {
        StageReport r(p.name);
        try {
            r = p.stage(ctx);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            r.pass = false;
            r.failure = e.what();
        }
        if (!c.out.empty()) emit(c, pipeline::envelope(c, r), r.stage, out);
        pipeline::json s{{"stage", r.stage}, {"pass", r.pass}};
        if (!r.pass) s["failure"] = r.failure;
        stages.push_back(s);
        if (!r.pass) {
            all.pass = false;
            all.failure = r.stage + ": " + r.failure;
            break;
        }
    }
    all.result["stages"] = stages;
    return report(c, all, out, err);
}

int run_graph_build(const RunConfig& c, const std::string& format, std::ostream& out, std::ostream& err)
{
    Context ctx(c);
    BuildOptions opt;
    opt.with_intervals = format == "jsonl";
    ExplicitGraph g = build_dyngraph(ctx.map(), c.levels, opt);
    auto write = [&](std::ostream& os) {
        if (format == "dot") write_dot(g, os);
        else if (format == "graphml") write_graphml(g, os);
        else write_jsonl(g, os);
    };
    StageReport r("graph_build");
    r.result = {{"levels", c.levels},
                {"format", format},
                {"vertices", g.vertices.size()},
                {"edges", g.edges.size()},
                {"sphere_sizes", g.sphere_sizes()}};
    if (c.out.empty()) {
        write(out);
        err << "bsl: graph with " << g.vertices.size() << " vertices and " << g.edges.size() << " edges\n";
        return 0;
    }
    std::ofstream f = open_out(c, "graph." + format);
    write(f);
    r.result["file"] = "graph." + format;
    return report(c, r, out, err);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    std::string word, format = "dot", map_path;

    CLI::App app{"Bowen-Series-type circle dynamics: construction and certification"};
    app.name("bsl");
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--canonical", c.canonical, "canonical rotation data with this N")->check(CLI::Range(4, 64));
    app.add_option("--comb", c.comb_file, "combinatorics JSON file");
    app.add_option("--map", map_path, "map JSON file (skips the solver)");
    app.add_option("--precision-bits", c.precision_bits, "working precision in bits")->check(CLI::Range(64L, 1L << 16));
    app.add_option("--epsilon", c.epsilon, "certification tolerance")->check(CLI::PositiveNumber);
    app.add_option("--oe-precision-bits", c.oe_precision_bits, "orbit equivalence precision")->check(CLI::Range(64L, 1L << 16));
    app.add_option("--levels", c.levels, "level bound")->check(CLI::Range(1, 40));
    CLI::Option* radius = app.add_option("--radius", c.radius, "ball radius")->check(CLI::Range(1, 12));
    app.add_option("--samples", c.samples, "sample count")->check(CLI::Range(1, 1000000));
    app.add_option("--seed", c.seed, "random seed");
    app.add_option("--out", c.out, "output directory");
    app.add_option("--grid", c.grid, "relation grid size")->check(CLI::Range(2, 10000000));
    app.add_option("--bound", c.bound, "iterate bound for the brute force search")->check(CLI::Range(1, 4096));
    app.add_option("--max-word-length", c.max_word_length, "random word length bound")->check(CLI::Range(1, 20));
    app.add_option("--j", c.profile_j, "generator index (1-based)");
    app.add_option("--fault-j", c.fault_j, "generator smoothed by the sensitivity probe (1-based)");
    app.add_option("--word", word, "comma separated 1-based letters");
    app.add_option("--format", format, "graph format")->check(CLI::IsMember({"dot", "graphml", "jsonl"}));

    std::function<int()> action;
    std::string current;
    auto on = [&](CLI::App* sub, std::function<int()> f) {
        sub->callback([&, sub, f] {
            current = (sub->get_parent() == &app ? "" : sub->get_parent()->get_name() + " ") + sub->get_name();
            action = f;
        });
    };
    auto stage = [&](CLI::App* parent, const std::string& name, const std::string& help, Stage s) {
        on(parent->add_subcommand(name, help), [&, s] {
                Context ctx(c);
                return report(c, s(ctx), out, err);
        });
    };

    CLI::App* combi = app.add_subcommand("combi", "permutation data")->require_subcommand(1);
    stage(combi, "check", "verify the permutation identities", pipeline::combi_check);

    CLI::App* map = app.add_subcommand("map", "circle map")->require_subcommand(1);
    stage(map, "solve", "solve the even model and certify it", pipeline::map_solve);
    CLI::App* validate = map->add_subcommand("validate", "certify a map JSON file");
    validate->add_option("file", map_path, "map JSON file");
    on(validate, [&] {
        if (map_path.empty()) throw ConfigError("map validate needs a map file");
        RunConfig v = c;
        v.map_file = map_path;
        Context ctx(v);
        return report(v, pipeline::map_validate(v, ctx.map()), out, err);
    });
    stage(map, "markovize", "move cutting points to the Markov position", pipeline::map_markovize);
    stage(map, "perron", "Perron root of the Markov transition matrix", pipeline::map_perron);

    CLI::App* gens = app.add_subcommand("gens", "generator family")->require_subcommand(1);
    stage(gens, "build", "build the generators and relations", pipeline::gens_build);
    stage(gens, "verify-cp", "check the cutting point relations on a grid", pipeline::gens_verify_cp);
    stage(gens, "profile", "partition profile of one generator", pipeline::gens_profile);

    CLI::App* graph = app.add_subcommand("graph", "dynamical graph")->require_subcommand(1);
    on(graph->add_subcommand("build", "export the folded graph"), [&] { return run_graph_build(c, format, out, err); });
    stage(graph, "structure", "sphere cycles, valency and merges", pipeline::graph_structure);
    stage(graph, "growth", "sphere growth against lambda", pipeline::graph_growth);
    stage(graph, "delta", "four point hyperbolicity estimate", pipeline::graph_delta);

    CLI::App* act = app.add_subcommand("action", "group action")->require_subcommand(1);
    stage(act, "verify", "verify the action on a ball", pipeline::action_verify);

    CLI::App* surf = app.add_subcommand("surface", "surface group diagnostics")->require_subcommand(1);
    on(surf->add_subcommand("euler", "Euler characteristic of the quotient"), [&] {
        // --radius applies to the quotient here
        if (radius->count() > 0) c.euler_radius = c.radius;
        Context ctx(c);
        return report(c, pipeline::surface_euler(ctx), out, err);
    });
    stage(surf, "dilate", "dilatation of group elements", pipeline::surface_dilate);
    stage(surf, "entropy", "volume growth against log lambda", pipeline::surface_entropy);

    CLI::App* oe = app.add_subcommand("oe", "orbit equivalence")->require_subcommand(1);
    on(oe->add_subcommand("fuzz", "constructive against brute force witnesses"), [&] {
        Context ctx(c);
        if (c.out.empty()) return report(c, pipeline::oe_fuzz(ctx), out, err);
        std::ofstream t = open_out(c, "oe_transcripts.jsonl");
        return report(c, pipeline::oe_fuzz(ctx, &t), out, err);
    });

    on(app.add_subcommand("all", "run every stage in order"), [&] { return run_all(c, out, err); });

    std::vector<const char*> argv{"bsl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    if (!action) {
        err << "bsl: no command\n";
        return 2;
    }

    try {
        if (!word.empty()) c.word = parse_word(word);
        if (!map_path.empty()) c.map_file = map_path;
        return action();
    } catch (const ConfigError& e) {
        err << "bsl: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "bsl: configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "bsl: stage " << current << " failed: " << e.what() << '\n';
        return 1;
    }
}

} // namespace bsl::cli
