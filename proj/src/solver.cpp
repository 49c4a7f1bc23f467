#include "pairkern/solver.hpp"

#include "pairkern/explicit_kernel.hpp"
#include "pairkern/metrics.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace pairkern {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// beta below this fraction of ||rhs|| ends the Lanczos process
constexpr double breakdown_threshold = 1e-14;

}  // namespace

// Paige-Saunders MINRES without preconditioning.
MinresResult minres_solve(const SymmetricOperator &op, std::span<const double> rhs, std::size_t max_iter, double rel_tol, const IterationCallback &callback) {
    const std::size_t n = op.dimension;
    if (rhs.size() != n) {
        throw std::invalid_argument("minres_solve: right-hand side length " + std::to_string(rhs.size()) + " does not match operator dimension " + std::to_string(n));
    }

    MinresResult result;
    result.solution.assign(n, 0.0);
    const double beta1 = norm(rhs);
    if (beta1 == 0.0) {
        result.residual_history.push_back(0.0);
        result.reason = StopReason::zero_rhs;
        return result;
    }
    result.residual_history.push_back(1.0);

    std::vector<double> r1(rhs.begin(), rhs.end());
    std::vector<double> r2 = r1;
    std::vector<double> y = r1;
    std::vector<double> v(n);
    std::vector<double> w(n, 0.0);
    std::vector<double> w1(n, 0.0);
    std::vector<double> w2(n, 0.0);
    std::vector<double> &x = result.solution;

    double oldb = 0.0;
    double beta = beta1;
    double dbar = 0.0;
    double epsln = 0.0;
    double phibar = beta1;
    double cs = -1.0;
    double sn = 0.0;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    result.reason = StopReason::max_iterations;
    for (std::size_t itn = 1; itn <= max_iter; ++itn) {
        const double s = 1.0 / beta;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = s * y[i];
        }
        op.apply(v, y);
        if (itn >= 2) {
            const double f = beta / oldb;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] -= f * r1[i];
            }
        }
        const double alfa = dot(v, y);
        const double g = alfa / beta;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] -= g * r2[i];
        }
        std::swap(r1, r2);
        r2 = y;
        oldb = beta;
        beta = norm(r2);

        // apply previous rotation, then compute and apply the new one
        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        const double gamma = std::max(std::hypot(gbar, beta), eps);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        const double denom = 1.0 / gamma;
        std::swap(w1, w2);  // w1 <- old w2
        std::swap(w2, w);   // w2 <- old w, w holds stale data overwritten below
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
            x[i] += phi * w[i];
        }

        const double rel_residual = std::abs(phibar) / beta1;
        result.residual_history.push_back(rel_residual);
        result.iterations = itn;

        if (callback && !callback(itn, x)) {
            result.reason = StopReason::stopped_by_callback;
            break;
        }
        if (rel_residual <= rel_tol) {
            result.reason = StopReason::converged;
            break;
        }
        if (beta < breakdown_threshold * beta1) {
            result.reason = StopReason::breakdown;
            break;
        }
    }
    return result;
}

namespace {

SymmetricOperator regularized_operator(std::shared_ptr<const PairwiseOperator> kernel_op, double lambda, GvtStats *stats) {
    const std::size_t n = kernel_op->rows();
    return { n, [kernel_op, lambda, stats](std::span<const double> in, std::span<double> out) {
                kernel_op->apply(in, out, stats);
                for (std::size_t i = 0; i < in.size(); ++i) {
                    out[i] += lambda * in[i];
                }
            } };
}

SymmetricOperator regularized_operator(std::shared_ptr<const ExplicitKernelMatrix> k, double lambda) {
    const std::size_t n = k->matrix.rows();
    return { n, [k, lambda](std::span<const double> in, std::span<double> out) {
                explicit_matvec(*k, in, out);
                for (std::size_t i = 0; i < in.size(); ++i) {
                    out[i] += lambda * in[i];
                }
            } };
}

}  // namespace

Model ridge_fit(const PairSample &train, const PairwiseKernelSpec &spec, const BaseKernels &kernels, const RidgeOptions &options, GvtStats *stats, const IterationCallback &callback) {
    if (!(options.lambda >= 0.0)) {
        throw std::invalid_argument("ridge_fit: lambda must be non-negative");
    }
    if (!kernels.drug) {
        throw std::invalid_argument("ridge_fit: drug kernel missing");
    }
    const std::span<const double> y = train.labels();

    SymmetricOperator op;
    if (options.backend == MatvecBackend::gvt) {
        auto kernel_op = std::make_shared<const PairwiseOperator>(spec, *kernels.drug, kernels.target.get(), train, train);
        op = regularized_operator(std::move(kernel_op), options.lambda, stats);
    } else {
        auto k = std::make_shared<const ExplicitKernelMatrix>(build_explicit(spec.name, *kernels.drug, kernels.target.get(), train, train));
        op = regularized_operator(std::move(k), options.lambda);
    }

    MinresResult solved = minres_solve(op, y, options.max_iter.value_or(train.size()), options.rel_tol, callback);

    Model model;
    model.dual = std::move(solved.solution);
    model.train_sample = train;
    model.spec = spec;
    model.kernels = kernels;
    model.lambda = options.lambda;
    model.iterations_used = solved.iterations;
    model.stop_reason = solved.reason;
    model.residual_history = std::move(solved.residual_history);
    return model;
}

std::vector<double> predict(const Model &model, const PairSample &test, GvtStats *stats) {
    const PairwiseOperator op(model.spec, *model.kernels.drug, model.kernels.target.get(), test, model.train_sample);
    return op.apply(model.dual, stats);
}

EarlyStoppingRule::EarlyStoppingRule(std::size_t patience) :
    patience_{ patience } {
    if (patience_ == 0) {
        throw std::invalid_argument("EarlyStoppingRule: patience must be at least 1");
    }
}

bool EarlyStoppingRule::observe(std::size_t iteration, double score) {
    if (!observed_ || score > best_score_) {
        observed_ = true;
        best_score_ = score;
        best_iteration_ = iteration;
        since_best_ = 0;
        return true;
    }
    ++since_best_;
    return since_best_ < patience_;
}

EarlyStoppingResult fit_early_stopping(const PairSample &inner, const PairSample &validation, const PairwiseKernelSpec &spec, const BaseKernels &kernels, double lambda, std::size_t patience, std::optional<std::size_t> max_iter, GvtStats *stats) {
    const std::span<const double> val_labels = validation.labels();
    if (!has_both_classes(val_labels)) {
        throw std::invalid_argument("degenerate validation labels");
    }
    EarlyStoppingRule rule(patience);
    const PairwiseOperator val_op(spec, *kernels.drug, kernels.target.get(), validation, inner);
    std::vector<double> scores(validation.size());

    auto on_iteration = [&](std::size_t iteration, std::span<const double> iterate) {
        val_op.apply(iterate, scores, stats);
        return rule.observe(iteration, auc(val_labels, scores));
    };

    RidgeOptions options;
    options.lambda = lambda;
    options.max_iter = max_iter.value_or(inner.size());
    const Model model = ridge_fit(inner, spec, kernels, options, stats, on_iteration);

    EarlyStoppingResult result;
    result.iterations_run = model.iterations_used;
    if (rule.has_observation()) {
        result.best_iterations = rule.best_iteration();
        result.best_validation_auc = rule.best_score();
    } else {
        // no iteration ran (zero labels or max_iter 0): the zero model ties every pair
        result.best_iterations = 0;
        result.best_validation_auc = 0.5;
    }
    return result;
}

}  // namespace pairkern
