// rmdp: generate Garnet instances, run the robust average-reward solvers and
// reproduce the robust vs non-robust comparison curves.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "rmdp/bench.hpp"
#include "rmdp/io.hpp"

using nlohmann::json;
using namespace rmdp;
using namespace rmdp::bench;

namespace {

constexpr int kOk = 0;
constexpr int kPropertyFailure = 1;
constexpr int kInvalidInput = 2;

/// Command-line values plus the config key each one overrides.
struct Flags {
    std::string config_path;
    std::vector<std::pair<std::string, CLI::Option*>> options;
    std::size_t states = 0, actions = 0, branching = 0, iterations = 0, report_every = 0, eval_T = 0,
                final_eval_T = 0, jobs = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;
    double smoothing = 0.0, radius = 0.0, interior_smoothing = 0.0, gamma = 0.0, epsilon = 0.0;
    std::string reward_law, model, kind, evaluator, out;
    std::vector<std::string> methods;
    bool no_timing = false;
};

void add_common(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config_path, "JSON config; flags override its values")->check(CLI::ExistingFile);
    auto add = [&](const std::string& key, CLI::Option* opt) { f.options.emplace_back(key, opt); };
    add("states", app.add_option("--states", f.states, "Garnet states (default 20)"));
    add("actions", app.add_option("--actions", f.actions, "Garnet actions (default 30)"));
    add("seed", app.add_option("--seed", f.seed, "single instance seed"));
    add("seeds", app.add_option("--seeds", f.seeds, "instance seeds"));
    add("smoothing", app.add_option("--smoothing", f.smoothing, "uniform mixing weight of nominal rows"));
    add("branching", app.add_option("--branching", f.branching, "successors per row, 0 for dense"));
    add("reward_law", app.add_option("--reward-law", f.reward_law, "gaussian|uniform"));
    add("model", app.add_option("--model", f.model, "MDP JSON file instead of a Garnet instance"));
    add("kind", app.add_option("--kind", f.kind, "contamination|tv|kl"));
    add("radius", app.add_option("--radius", f.radius, "uncertainty radius R"));
    add("interior_smoothing", app.add_flag("--interior-smoothing{0.01}", f.interior_smoothing,
                                           "mix every candidate row with uniform at this weight"));
    add("methods", app.add_option("--method", f.methods,
                                  "robust-vi-limit|robust-rvi|robust-dvi|nonrobust-vi|nonrobust-rvi (repeatable)"));
    add("iterations", app.add_option("--iterations", f.iterations, "solver iteration budget"));
    add("report_every", app.add_option("--report-every", f.report_every, "curve sampling stride"));
    add("eval_T", app.add_option("--eval-T", f.eval_T, "evaluation horizon per curve point"));
    add("final_eval_T", app.add_option("--final-eval-T", f.final_eval_T, "evaluation horizon of final policies"));
    add("evaluator", app.add_option("--evaluator", f.evaluator, "limit|rvi"));
    add("gamma", app.add_option("--gamma", f.gamma, "discount of robust-dvi"));
    add("epsilon", app.add_option("--epsilon", f.epsilon, "RVI span / DVI sup-norm tolerance"));
    add("out", app.add_option("--out", f.out, "output directory"));
    add("no_timing", app.add_flag("--no-timing", f.no_timing, "write 0 in the elapsed_ms column"));
    add("jobs", app.add_option("--jobs", f.jobs, "worker threads, 0 for all cores"));
}

json flag_value(const Flags& f, const std::string& key) {
    if (key == "states") return f.states;
    if (key == "actions") return f.actions;
    if (key == "seed") return f.seed;
    if (key == "seeds") return f.seeds;
    if (key == "smoothing") return f.smoothing;
    if (key == "branching") return f.branching;
    if (key == "reward_law") return f.reward_law;
    if (key == "model") return f.model;
    if (key == "kind") return f.kind;
    if (key == "radius") return f.radius;
    if (key == "interior_smoothing") return f.interior_smoothing;
    if (key == "methods") return f.methods;
    if (key == "iterations") return f.iterations;
    if (key == "report_every") return f.report_every;
    if (key == "eval_T") return f.eval_T;
    if (key == "final_eval_T") return f.final_eval_T;
    if (key == "evaluator") return f.evaluator;
    if (key == "gamma") return f.gamma;
    if (key == "epsilon") return f.epsilon;
    if (key == "out") return f.out;
    if (key == "no_timing") return f.no_timing;
    return f.jobs;
}

/// Config file values, then flags. Commands working on one instance default to seed 0.
RunConfig resolve(const Flags& f, bool single_instance_defaults) {
    json merged = json::object();
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        try {
            in >> merged;
        } catch (const json::exception& e) {
            throw InvalidInput("cannot parse config " + f.config_path + ": " + e.what());
        }
        if (!merged.is_object()) throw InvalidInput("config " + f.config_path + " is not a JSON object");
    }
    for (const auto& [key, opt] : f.options) {
        if (opt->count() == 0) continue;
        merged[key] = flag_value(f, key);
        // a flag wins over either spelling in the file
        if (key == "seed") merged.erase("seeds");
        if (key == "seeds") merged.erase("seed");
        if (key == "methods") merged.erase("method");
    }
    RunConfig base;
    if (single_instance_defaults) {
        base.seeds = {0};
        base.methods = {Method::RobustRvi};
    }
    return config_from_json(merged, base);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << text;
}

std::string instance_label(const RunConfig& c, std::uint64_t seed) {
    return c.model_path.empty() ? "seed" + std::to_string(seed) : std::filesystem::path(c.model_path).stem().string();
}

int cmd_garnet(const RunConfig& c) {
    const auto dir = ensure_directory(c.out_dir);
    for (auto seed : c.seeds) {
        GarnetConfig g = c.garnet;
        g.seed = seed;
        const auto model = generate(g);
        const auto path = dir / ("garnet-" + std::to_string(g.n_states) + "x" + std::to_string(g.n_actions) +
                                 "-seed" + std::to_string(seed) + ".json");
        write_text(path, to_json(model).dump() + "\n");
        std::cout << path.string() << ' ' << fingerprint(model) << '\n';
    }
    return kOk;
}

int cmd_solve(const RunConfig& c) {
    const auto dir = ensure_directory(c.out_dir);
    bool all_converged = true;
    for (auto seed : c.seeds) {
        const auto model = make_instance(c, seed);
        for (Method method : c.methods) {
            auto outcome = solve(model, c, method, seed);
            const std::string stem = "solve-" + to_string(method) + "-" + to_string(c.kind) + "-R" +
                                     format_number(c.radius) + "-" + instance_label(c, seed);
            write_text(dir / (stem + ".json"), outcome.report.dump(2) + "\n");
            std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
            write_csv(csv, outcome.rows, c.timing);
            std::cout << to_string(method) << ' ' << instance_label(c, seed)
                      << " gain=" << format_number(outcome.report["gain"].get<double>())
                      << " robust_avg_reward=" << format_number(outcome.report["robust_avg_reward"].get<double>())
                      << " iterations=" << outcome.report["iterations"].get<std::size_t>()
                      << (outcome.converged ? "" : " NOT CONVERGED") << '\n';
            for (const auto& w : outcome.report["warnings"]) std::cout << "  warning: " << w.get<std::string>() << '\n';
            all_converged = all_converged && outcome.converged;
        }
    }
    return all_converged ? kOk : kPropertyFailure;
}

int report_compare(const CompareOutcome& outcome, const RunConfig& c) {
    const auto stem = compare_stem(c);
    write_compare_outputs(outcome, c, stem);
    for (const auto& o : outcome.summary["ordering"]) {
        std::cout << (o["holds"].get<bool>() ? "ok   " : "FAIL ") << to_string(c.kind) << " R="
                  << format_number(c.radius) << " seed " << o["seed"].get<std::uint64_t>() << ' '
                  << o["robust"].get<std::string>() << '=' << format_number(o["robust_value"].get<double>()) << " vs "
                  << o["nonrobust"].get<std::string>() << '=' << format_number(o["nonrobust_value"].get<double>())
                  << '\n';
    }
    std::cout << "wrote " << (std::filesystem::path(c.out_dir) / (stem + ".{csv,svg,json}")).string() << '\n';
    return outcome.ordering_holds ? kOk : kPropertyFailure;
}

int cmd_compare(const RunConfig& c) { return report_compare(compare(c), c); }

int cmd_sweep(RunConfig c) {
    int status = kOk;
    for (const auto& setting : c.sweep) {
        c.kind = setting.kind;
        c.radius = setting.radius;
        c.radii.reset();
        if (report_compare(compare(c), c) != kOk) status = kPropertyFailure;
    }
    return status;
}

int cmd_check(const RunConfig& c) {
    const auto dir = ensure_directory(c.out_dir);
    bool passed = true;
    for (auto seed : c.seeds) {
        // non-strict so that a damaged model is reported as a failed property
        const auto model = c.model_path.empty() ? make_instance(c, seed) : load_model(c.model_path, false);
        const auto spec = make_spec(c, model.n_states(), model.n_actions());
        const auto report = run_check(model, spec, seed);
        for (const auto& p : report.properties) {
            std::cout << (p.passed ? "PASS " : "FAIL ") << p.name << " measured=" << format_number(p.measured)
                      << " tolerance=" << format_number(p.tolerance) << (p.note.empty() ? "" : "  (" + p.note + ")")
                      << '\n';
        }
        for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
        const std::string stem = "check-" + to_string(c.kind) + "-R" + format_number(c.radius) + "-" +
                                 instance_label(c, seed);
        write_text(dir / (stem + ".json"), report.to_json().dump(2) + "\n");
        passed = passed && report.passed();
        if (c.model_path.size()) break;
    }
    return passed ? kOk : kPropertyFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust average-reward MDP solvers and benchmark harness"};
    app.require_subcommand(1);
    Flags flags;
    struct Command {
        CLI::App* app;
        bool single_instance;
        std::function<int(const RunConfig&)> run;
    };
    std::vector<Command> commands{
        {app.add_subcommand("garnet", "write Garnet instances as MDP JSON"), true, cmd_garnet},
        {app.add_subcommand("solve", "run solvers, write report JSON and CSV"), true, cmd_solve},
        {app.add_subcommand("compare", "robust vs non-robust curves for one (kind, radius)"), false, cmd_compare},
        {app.add_subcommand("check", "run the invariant suite on one instance"), true, cmd_check},
        {app.add_subcommand("sweep", "compare over every configured (kind, radius)"), false, cmd_sweep},
    };
    for (auto& cmd : commands) add_common(*cmd.app, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidInput;
    }

    try {
        for (auto& cmd : commands) {
            if (cmd.app->parsed()) return cmd.run(resolve(flags, cmd.single_instance));
        }
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPropertyFailure;
    }
    return kInvalidInput;
}
