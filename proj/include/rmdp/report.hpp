#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rmdp {

/// Called after every iteration with the iteration count t (1-based) and the new iterate.
using IterationObserver = std::function<void(std::size_t t, std::span<const double> iterate)>;

/// Iteration trace and certificates produced by every solver.
struct SolveReport {
    std::size_t iterations = 0;
    bool converged = false;
    /// Stopping statistic of the last iteration (sup-norm or span of successive iterates).
    double final_difference = 0.0;
    /// Stopping statistic sampled every `trace_stride` iterations.
    std::vector<double> trace;
    std::size_t trace_stride = 1;
    /// Solver-specific a-posteriori bound (discounted: γ·diff/(1-γ) on the value error).
    double error_bound = 0.0;
    /// Defect of the equation the returned solution is meant to satisfy.
    double residual = 0.0;
    std::vector<std::string> warnings;
    double elapsed_ms = 0.0;
};

} // namespace rmdp
