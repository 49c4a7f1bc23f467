#pragma once

#include "pairkern/core_types.hpp"
#include "pairkern/gvt.hpp"
#include "pairkern/pairwise_kernels.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace pairkern {

/// A symmetric linear map of fixed dimension, given only through its action on vectors.
struct SymmetricOperator {
    std::size_t dimension{ 0 };
    std::function<void(std::span<const double> in, std::span<double> out)> apply;
};

enum class StopReason {
    converged,
    max_iterations,
    /// Lanczos recurrence broke down (next basis vector vanished).
    breakdown,
    stopped_by_callback,
    zero_rhs,
};

/// Called once per iteration with the current iterate; returning false ends the solve.
using IterationCallback = std::function<bool(std::size_t iteration, std::span<const double> iterate)>;

struct MinresResult {
    std::vector<double> solution;
    /// residual_history[k] = ||rhs - A x_k|| / ||rhs|| as tracked by the recurrence;
    /// entry 0 belongs to the zero initial guess.
    std::vector<double> residual_history;
    std::size_t iterations{ 0 };
    StopReason reason{ StopReason::max_iterations };
};

/// Minimal residual method for symmetric (possibly indefinite) systems, started from zero.
[[nodiscard]] MinresResult minres_solve(const SymmetricOperator &op, std::span<const double> rhs, std::size_t max_iter, double rel_tol, const IterationCallback &callback = {});

enum class MatvecBackend {
    /// Sum of GVT products over the kernel's term decomposition.
    gvt,
    /// Materialized kernel matrix; quadratic memory.
    explicit_matrix,
};

struct RidgeOptions {
    double lambda{ 1e-5 };
    /// Defaults to the training set size.
    std::optional<std::size_t> max_iter;
    double rel_tol{ 1e-8 };
    MatvecBackend backend{ MatvecBackend::gvt };
};

/// Dual-form kernel ridge regression model f(x) = sum_i dual[i] * k(train_i, x).
struct Model {
    std::vector<double> dual;
    PairSample train_sample;
    PairwiseKernelSpec spec;
    BaseKernels kernels;
    double lambda{ 0.0 };
    std::size_t iterations_used{ 0 };
    StopReason stop_reason{ StopReason::max_iterations };
    std::vector<double> residual_history;
};

/// Solves (K + lambda I) a = y for the training pairs without materializing K (gvt backend).
[[nodiscard]] Model ridge_fit(const PairSample &train, const PairwiseKernelSpec &spec, const BaseKernels &kernels, const RidgeOptions &options, GvtStats *stats = nullptr, const IterationCallback &callback = {});

[[nodiscard]] std::vector<double> predict(const Model &model, const PairSample &test, GvtStats *stats = nullptr);

/// Validation-driven stopping rule: stop after `patience` consecutive observations that fail
/// to strictly improve on the best score. Ties keep the earliest iteration.
class EarlyStoppingRule {
  public:
    explicit EarlyStoppingRule(std::size_t patience);

    /// Records the score of an iteration; returns false once training should stop.
    bool observe(std::size_t iteration, double score);

    [[nodiscard]] std::size_t best_iteration() const noexcept { return best_iteration_; }
    [[nodiscard]] double best_score() const noexcept { return best_score_; }
    [[nodiscard]] bool has_observation() const noexcept { return observed_; }

  private:
    std::size_t patience_;
    std::size_t best_iteration_{ 0 };
    double best_score_{ 0.0 };
    std::size_t since_best_{ 0 };
    bool observed_{ false };
};

struct EarlyStoppingResult {
    std::size_t best_iterations{ 0 };
    double best_validation_auc{ 0.5 };
    std::size_t iterations_run{ 0 };
};

/// Runs MINRES on the inner sample, scoring the validation sample after every iteration.
/// Throws std::invalid_argument("degenerate validation labels") for a single-class validation set.
[[nodiscard]] EarlyStoppingResult fit_early_stopping(const PairSample &inner, const PairSample &validation, const PairwiseKernelSpec &spec, const BaseKernels &kernels, double lambda, std::size_t patience, std::optional<std::size_t> max_iter = std::nullopt, GvtStats *stats = nullptr);

}  // namespace pairkern
