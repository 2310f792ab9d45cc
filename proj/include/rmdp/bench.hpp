#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmdp/core.hpp"
#include "rmdp/garnet.hpp"
#include "rmdp/report.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp::bench {

enum class Method { RobustViLimit, RobustRvi, RobustDvi, NonrobustVi, NonrobustRvi };

std::string to_string(Method method);
Method parse_method(const std::string& name);
bool is_robust(Method method);

/// How a policy's robust average reward is measured.
enum class Evaluator {
    Limit, ///< robust_avg_eval_limit, mean of V_T over states
    Rvi,   ///< gain of robust_rvi_eval
};

std::string to_string(Evaluator evaluator);
Evaluator parse_evaluator(const std::string& name);

struct Setting {
    SetKind kind = SetKind::Contamination;
    double radius = 0.0;
};

struct RunConfig {
    /// Instance family; `seed` is replaced by each entry of `seeds`.
    GarnetConfig garnet;
    /// Non-empty: load this model instead of generating one per seed.
    std::string model_path;
    SetKind kind = SetKind::Contamination;
    double radius = 0.4;
    /// Per-(s,a) radii; overrides `radius` when present.
    std::optional<Matrix> radii;
    double interior_smoothing = 0.0;
    std::vector<Method> methods{Method::RobustViLimit, Method::NonrobustVi, Method::RobustRvi,
                                Method::NonrobustRvi};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    /// Solver budget; unset means the command default (curves: 200, solve: the solver's own).
    std::optional<std::size_t> iterations;
    std::size_t report_every = 5;
    std::size_t eval_T = 5000;
    std::size_t final_eval_T = 20'000;
    Evaluator evaluator = Evaluator::Limit;
    double gamma = 0.99;
    double epsilon = 1e-8;
    std::string out_dir = "out";
    bool timing = true;
    /// Worker threads; 0 means hardware concurrency.
    std::size_t jobs = 0;
    /// (kind, radius) pairs run by `sweep`.
    std::vector<Setting> sweep{{SetKind::Contamination, 0.4}, {SetKind::TotalVariation, 0.6}, {SetKind::KL, 0.8}};
};

/// Reads flat keys (states, actions, seed, seeds, kind, radius, method, methods, ...) on top of `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json to_json(const RunConfig& config);

UncertaintySpec make_spec(const RunConfig& config, std::size_t n_states, std::size_t n_actions);
MdpModel make_instance(const RunConfig& config, std::uint64_t seed);

struct ExperimentRow {
    std::uint64_t seed = 0;
    std::size_t t = 0;
    Method method = Method::RobustViLimit;
    SetKind kind = SetKind::Contamination;
    double radius = 0.0;
    double robust_avg_reward = 0.0;
    double elapsed_ms = 0.0;
};

inline constexpr const char* kCsvHeader = "seed,t,method,kind,radius,robust_avg_reward,elapsed_ms";

/// Shortest round-trip decimal form.
std::string format_number(double x);
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, bool timing);
void sort_rows(std::vector<ExperimentRow>& rows, const std::vector<Method>& method_order);

double robust_avg_reward(const MdpModel& model, const UncertaintySpec& spec, const Policy& policy,
                         Evaluator evaluator, std::size_t horizon);

/// Memoized robust average reward per distinct policy.
class PolicyScorer {
  public:
    PolicyScorer(const MdpModel& model, const UncertaintySpec& spec, Evaluator evaluator)
        : model_(model), spec_(spec), evaluator_(evaluator) {}
    double operator()(const Policy& policy, std::size_t horizon);
    std::size_t evaluations() const { return cache_.size(); }

  private:
    const MdpModel& model_;
    const UncertaintySpec& spec_;
    Evaluator evaluator_;
    std::map<std::pair<std::size_t, std::vector<double>>, double> cache_;
};

struct Curve {
    Method method = Method::RobustViLimit;
    std::vector<ExperimentRow> rows;
    Policy final_policy;
    /// Final policy re-evaluated with `final_eval_T`.
    double final_reward = 0.0;
    SolveReport report;
    Vector value;
    double gain = 0.0;
};

/// Runs `method` for the curve budget, scoring the greedy policy every `report_every`
/// iterations (and at t = 0 and the last iteration) under the robust spec. Solvers that stop
/// early hold their final policy up to the budget when `pad_to_budget` is set.
Curve run_curve(const MdpModel& model, const RunConfig& config, Method method, std::uint64_t seed,
                PolicyScorer& scorer, std::size_t default_budget, bool pad_to_budget = true);

struct SolveOutcome {
    nlohmann::json report;
    std::vector<ExperimentRow> rows;
    bool converged = false;
};

SolveOutcome solve(const MdpModel& model, const RunConfig& config, Method method, std::uint64_t seed);

struct CompareOutcome {
    std::vector<ExperimentRow> rows;
    nlohmann::json summary;
    bool ordering_holds = true;
};

/// Every configured method on every seed for one (kind, radius).
CompareOutcome compare(const RunConfig& config);

/// Writes `<stem>.csv`, `<stem>.svg` and `<stem>.json` into the output directory.
void write_compare_outputs(const CompareOutcome& outcome, const RunConfig& config, const std::string& stem);
std::string compare_stem(const RunConfig& config);

/// Per-method mean curve plus faint per-seed curves, one polyline per series.
std::string render_svg(const std::vector<ExperimentRow>& rows, const std::vector<Method>& methods,
                       const std::string& title);

struct Property {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

struct CheckReport {
    std::vector<Property> properties;
    std::vector<std::string> warnings;
    bool passed() const;
    nlohmann::json to_json() const;
};

/// Validation, support-function oracles, contraction, residuals, method agreement,
/// stationary equivalence and the Blackwell probe on one instance.
CheckReport run_check(const MdpModel& model, const UncertaintySpec& spec, std::uint64_t seed = 0);

/// Runs `work(i)` for i in [0, count) on at most `jobs` threads.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& work);

/// Creates `dir` if needed; throws InvalidInput naming the path when that fails.
std::filesystem::path ensure_directory(const std::string& dir);

} // namespace rmdp::bench
