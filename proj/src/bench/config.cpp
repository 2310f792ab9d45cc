#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "rmdp/bench.hpp"
#include "rmdp/io.hpp"

namespace rmdp::bench {

using nlohmann::json;

namespace {

const std::pair<Method, const char*> kMethodNames[] = {
    {Method::RobustViLimit, "robust-vi-limit"}, {Method::RobustRvi, "robust-rvi"},
    {Method::RobustDvi, "robust-dvi"},          {Method::NonrobustVi, "nonrobust-vi"},
    {Method::NonrobustRvi, "nonrobust-rvi"},
};

template <typename T>
T read(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw InvalidInput(std::string("config key '") + key + "' has the wrong type");
    }
}

std::vector<Method> read_methods(const json& value) {
    std::vector<Method> out;
    if (value.is_string()) {
        out.push_back(parse_method(value.get<std::string>()));
    } else if (value.is_array()) {
        for (const auto& m : value) {
            if (!m.is_string()) throw InvalidInput("methods must be strings");
            out.push_back(parse_method(m.get<std::string>()));
        }
    } else {
        throw InvalidInput("method must be a string or a list of strings");
    }
    if (out.empty()) throw InvalidInput("at least one method is required");
    return out;
}

} // namespace

std::string to_string(Method method) {
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) return name;
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    for (const auto& [m, known] : kMethodNames) {
        if (name == known) return m;
    }
    throw InvalidInput("unknown method '" + name +
                       "' (expected robust-vi-limit|robust-rvi|robust-dvi|nonrobust-vi|nonrobust-rvi)");
}

bool is_robust(Method method) {
    return method == Method::RobustViLimit || method == Method::RobustRvi || method == Method::RobustDvi;
}

std::string to_string(Evaluator evaluator) { return evaluator == Evaluator::Limit ? "limit" : "rvi"; }

Evaluator parse_evaluator(const std::string& name) {
    if (name == "limit") return Evaluator::Limit;
    if (name == "rvi") return Evaluator::Rvi;
    throw InvalidInput("unknown evaluator '" + name + "' (expected limit|rvi)");
}

RunConfig config_from_json(const json& j, RunConfig c) {
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    c.garnet.n_states = read(j, "states", c.garnet.n_states);
    c.garnet.n_actions = read(j, "actions", c.garnet.n_actions);
    c.garnet.smoothing = read(j, "smoothing", c.garnet.smoothing);
    c.garnet.branching = read(j, "branching", c.garnet.branching);
    if (j.contains("reward_law")) c.garnet.reward_law = parse_reward_law(read<std::string>(j, "reward_law", ""));
    c.model_path = read(j, "model", c.model_path);

    if (j.contains("kind")) c.kind = parse_set_kind(read<std::string>(j, "kind", ""));
    if (auto it = j.find("radius"); it != j.end()) {
        if (it->is_number()) {
            c.radius = it->get<double>();
            c.radii.reset();
        } else if (it->is_array()) {
            const auto rows = it->size();
            const auto cols = rows ? (*it)[0].size() : 0;
            Matrix radii(rows, cols);
            for (std::size_t s = 0; s < rows; ++s) {
                if ((*it)[s].size() != cols) throw InvalidInput("radius matrix is ragged");
                for (std::size_t a = 0; a < cols; ++a) radii(s, a) = (*it)[s][a].get<double>();
            }
            c.radii = std::move(radii);
        } else {
            throw InvalidInput("radius must be a number or a [[float]] matrix");
        }
    }
    c.interior_smoothing = read(j, "interior_smoothing", c.interior_smoothing);

    if (j.contains("methods")) c.methods = read_methods(j.at("methods"));
    if (j.contains("method")) c.methods = read_methods(j.at("method"));
    if (j.contains("seeds")) {
        c.seeds = read<std::vector<std::uint64_t>>(j, "seeds", {});
        if (c.seeds.empty()) throw InvalidInput("seeds must not be empty");
    }
    if (j.contains("seed")) c.seeds = {read<std::uint64_t>(j, "seed", 0)};
    if (j.contains("iterations")) c.iterations = read<std::size_t>(j, "iterations", 0);
    c.report_every = read(j, "report_every", c.report_every);
    c.eval_T = read(j, "eval_T", c.eval_T);
    c.final_eval_T = read(j, "final_eval_T", c.final_eval_T);
    if (j.contains("evaluator")) c.evaluator = parse_evaluator(read<std::string>(j, "evaluator", ""));
    c.gamma = read(j, "gamma", c.gamma);
    c.epsilon = read(j, "epsilon", c.epsilon);
    c.out_dir = read(j, "out", c.out_dir);
    if (j.contains("no_timing")) c.timing = !read(j, "no_timing", false);
    c.jobs = read(j, "jobs", c.jobs);
    if (auto it = j.find("sweep"); it != j.end()) {
        c.sweep.clear();
        for (const auto& entry : *it) {
            c.sweep.push_back({parse_set_kind(read<std::string>(entry, "kind", "")), read(entry, "radius", 0.0)});
        }
    }

    if (c.report_every == 0) throw InvalidInput("report_every must be positive");
    if (c.eval_T == 0 || c.final_eval_T == 0) throw InvalidInput("evaluation horizons must be positive");
    if (c.iterations && *c.iterations == 0) throw InvalidInput("iterations must be positive");
    if (!(c.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
    if (!(c.interior_smoothing >= 0.0 && c.interior_smoothing < 1.0)) {
        throw InvalidInput("interior_smoothing must lie in [0,1)");
    }
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["states"] = c.garnet.n_states;
    j["actions"] = c.garnet.n_actions;
    j["smoothing"] = c.garnet.smoothing;
    j["branching"] = c.garnet.branching;
    j["reward_law"] = to_string(c.garnet.reward_law);
    if (!c.model_path.empty()) j["model"] = c.model_path;
    j["kind"] = to_string(c.kind);
    if (c.radii) {
        json rows = json::array();
        for (std::size_t s = 0; s < c.radii->rows(); ++s) {
            auto row = c.radii->row(s);
            rows.push_back(std::vector<double>(row.begin(), row.end()));
        }
        j["radius"] = rows;
    } else {
        j["radius"] = c.radius;
    }
    j["interior_smoothing"] = c.interior_smoothing;
    json methods = json::array();
    for (Method m : c.methods) methods.push_back(to_string(m));
    j["methods"] = methods;
    j["seeds"] = c.seeds;
    if (c.iterations) j["iterations"] = *c.iterations;
    j["report_every"] = c.report_every;
    j["eval_T"] = c.eval_T;
    j["final_eval_T"] = c.final_eval_T;
    j["evaluator"] = to_string(c.evaluator);
    j["gamma"] = c.gamma;
    j["epsilon"] = c.epsilon;
    json sweep = json::array();
    for (const auto& s : c.sweep) sweep.push_back({{"kind", to_string(s.kind)}, {"radius", s.radius}});
    j["sweep"] = sweep;
    return j;
}

UncertaintySpec make_spec(const RunConfig& c, std::size_t n_states, std::size_t n_actions) {
    if (c.radii) {
        UncertaintySpec spec(c.kind, *c.radii, c.interior_smoothing);
        spec.check_shape(n_states, n_actions);
        return spec;
    }
    return UncertaintySpec(c.kind, c.radius, c.interior_smoothing);
}

MdpModel make_instance(const RunConfig& c, std::uint64_t seed) {
    if (!c.model_path.empty()) return load_model(c.model_path);
    GarnetConfig g = c.garnet;
    g.seed = seed;
    return generate(g);
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& work) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
}

std::filesystem::path ensure_directory(const std::string& dir) {
    std::filesystem::path path(dir);
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec || !std::filesystem::is_directory(path)) {
        throw InvalidInput("cannot create output directory " + path.string() +
                           (ec ? ": " + ec.message() : ": not a directory"));
    }
    return path;
}

} // namespace rmdp::bench
