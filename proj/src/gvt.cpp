#include "pairkern/gvt.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pairkern {

GvtCost gvt_cost(std::uint64_t n_out, std::uint64_t m_out, std::uint64_t q_out, std::uint64_t n_in, std::uint64_t m_in, std::uint64_t q_in) noexcept {
    if (n_in == 0 || n_out == 0) {
        // nothing to contract or nothing to produce
        return { 0, 0 };
    }
    return { q_out * n_in + m_in * n_out, m_out * n_in + q_in * n_out };
}

GvtCost gvt_cost(const GvtProblem &problem) noexcept {
    return gvt_cost(problem.out_size(), problem.first_factor.rows(), problem.second_factor.rows(), problem.in_size(), problem.first_factor.cols(), problem.second_factor.cols());
}

GvtVariant resolve_variant(const GvtProblem &problem, GvtVariant requested) noexcept {
    if (requested != GvtVariant::automatic) {
        return requested;
    }
    const GvtCost cost = gvt_cost(problem);
    return cost.variant1 <= cost.variant2 ? GvtVariant::first : GvtVariant::second;
}

void GvtStats::merge(const GvtStats &other) noexcept {
    total_ops += other.total_ops;
    calls += other.calls;
    if (other.calls > 0) {
        last_ops = other.last_ops;
        last_variant = other.last_variant;
        last_intermediate_size = other.last_intermediate_size;
    }
}

namespace {

void check_ids(std::span<const index_type> ids, std::size_t bound, const char *what) {
    const auto it = std::find_if(ids.begin(), ids.end(), [bound](index_type id) { return id >= bound; });
    if (it != ids.end()) {
        throw std::invalid_argument(std::string("gvt_matvec: ") + what + " id " + std::to_string(*it) + " out of bounds (" + std::to_string(bound) + ")");
    }
}

// Shared kernel of both variants. `inner` is the factor contracted against the in-sample
// first (indexed by inner_out ids on rows and inner_in ids on columns), `outer` is applied
// afterwards. The intermediate has shape inner.rows x outer.cols and is accumulated
// transposed so that both passes stream through contiguous rows.
std::uint64_t contract(const DenseMatrix &inner,
                       const DenseMatrix &outer,
                       std::span<const index_type> inner_out,
                       std::span<const index_type> outer_out,
                       std::span<const index_type> inner_in,
                       std::span<const index_type> outer_in,
                       std::span<const double> v,
                       std::span<double> u) {
    const std::size_t inner_rows = inner.rows();
    const std::size_t outer_cols = outer.cols();
    std::uint64_t ops = 0;

    // pass 1: Wt[h, t] = sum_{j : outer_in[j] = h} inner[t, inner_in[j]] * v[j]
    const DenseMatrix inner_t = inner.transposed();
    std::vector<double> wt(outer_cols * inner_rows, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double vj = v[j];
        double *dst = wt.data() + outer_in[j] * inner_rows;
        const double *src = inner_t.data() + inner_in[j] * inner_rows;
        for (std::size_t t = 0; t < inner_rows; ++t) {
            dst[t] += src[t] * vj;
        }
        ops += inner_rows;
    }

    // W[t, h] for row-contiguous access in pass 2
    std::vector<double> w(inner_rows * outer_cols);
    for (std::size_t h = 0; h < outer_cols; ++h) {
        for (std::size_t t = 0; t < inner_rows; ++t) {
            w[t * outer_cols + h] = wt[h * inner_rows + t];
        }
    }

    // pass 2: u[i] = sum_h outer[outer_out[i], h] * W[inner_out[i], h]
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double *a = outer.data() + outer_out[i] * outer_cols;
        const double *b = w.data() + inner_out[i] * outer_cols;
        double acc = 0.0;
        for (std::size_t h = 0; h < outer_cols; ++h) {
            acc += a[h] * b[h];
        }
        u[i] = acc;
        ops += outer_cols;
    }
    return ops;
}

}  // namespace

void validate_gvt_problem(const GvtProblem &problem, std::size_t vector_size) {
    if (problem.out_first.size() != problem.out_second.size()) {
        throw std::invalid_argument("gvt_matvec: out-sample id sequences differ in length");
    }
    if (problem.in_first.size() != problem.in_second.size()) {
        throw std::invalid_argument("gvt_matvec: in-sample id sequences differ in length");
    }
    if (vector_size != problem.in_size()) {
        throw std::invalid_argument("gvt_matvec: vector length " + std::to_string(vector_size) + " does not match in-sample size " + std::to_string(problem.in_size()));
    }
    check_ids(problem.out_first, problem.first_factor.rows(), "out-sample first");
    check_ids(problem.in_first, problem.first_factor.cols(), "in-sample first");
    check_ids(problem.out_second, problem.second_factor.rows(), "out-sample second");
    check_ids(problem.in_second, problem.second_factor.cols(), "in-sample second");
}

std::vector<double> gvt_matvec(const GvtProblem &problem, std::span<const double> v, GvtVariant variant, GvtStats *stats) {
    validate_gvt_problem(problem, v.size());

    const GvtVariant chosen = resolve_variant(problem, variant);
    std::vector<double> u(problem.out_size(), 0.0);
    std::uint64_t ops = 0;
    std::size_t intermediate = 0;
    if (problem.in_size() == 0 || problem.out_size() == 0) {
        // empty product, u stays zero
    } else if (chosen == GvtVariant::first) {
        // W is q_out x m_in
        ops = contract(problem.second_factor, problem.first_factor, problem.out_second, problem.out_first, problem.in_second, problem.in_first, v, u);
        intermediate = problem.second_factor.rows() * problem.first_factor.cols();
    } else {
        // W' is m_out x q_in
        ops = contract(problem.first_factor, problem.second_factor, problem.out_first, problem.out_second, problem.in_first, problem.in_second, v, u);
        intermediate = problem.first_factor.rows() * problem.second_factor.cols();
    }

    if (stats != nullptr) {
        stats->total_ops += ops;
        stats->last_ops = ops;
        stats->calls += 1;
        stats->last_variant = chosen;
        stats->last_intermediate_size = intermediate;
    }
    return u;
}

}  // namespace pairkern
