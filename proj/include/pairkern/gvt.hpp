#pragma once

#include "pairkern/core_types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pairkern {

/**
 * Generalized vec trick.
 *
 * Computes u = R_out (A ⊗ B) R_in^T v without forming the Kronecker product. Row i of
 * R_out selects the pair (out_first[i], out_second[i]), row j of R_in the pair
 * (in_first[j], in_second[j]), so that
 *
 *     u[i] = sum_j A[out_first[i], in_first[j]] * B[out_second[i], in_second[j]] * v[j].
 *
 * Ids are expected to be compact (see relabel_compact): A is indexed rows by out-sample
 * first ids and columns by in-sample first ids, B likewise for the second ids. Matrix
 * dimensions therefore double as the unique counts that drive the cost.
 */
struct GvtProblem {
    const DenseMatrix &first_factor;
    const DenseMatrix &second_factor;
    std::span<const index_type> out_first;
    std::span<const index_type> out_second;
    std::span<const index_type> in_first;
    std::span<const index_type> in_second;

    [[nodiscard]] std::size_t out_size() const noexcept { return out_first.size(); }
    [[nodiscard]] std::size_t in_size() const noexcept { return in_first.size(); }
};

enum class GvtVariant {
    automatic,
    /// Contract the in-sample against B first; intermediate is B.rows x A.cols.
    first,
    /// Contract the in-sample against A first; intermediate is A.rows x B.cols.
    second,
};

struct GvtCost {
    std::uint64_t variant1{ 0 };
    std::uint64_t variant2{ 0 };

    [[nodiscard]] std::uint64_t minimum() const noexcept { return variant1 <= variant2 ? variant1 : variant2; }
    friend bool operator==(const GvtCost &, const GvtCost &) = default;
};

/// Multiply-add counts of both evaluation orders:
/// variant1 = q_out * n_in + m_in * n_out, variant2 = m_out * n_in + q_in * n_out.
/// An empty in- or out-sample costs nothing.
[[nodiscard]] GvtCost gvt_cost(std::uint64_t n_out, std::uint64_t m_out, std::uint64_t q_out, std::uint64_t n_in, std::uint64_t m_in, std::uint64_t q_in) noexcept;

[[nodiscard]] GvtCost gvt_cost(const GvtProblem &problem) noexcept;

/// Resolves `automatic` to the cheaper variant; ties go to variant 1.
[[nodiscard]] GvtVariant resolve_variant(const GvtProblem &problem, GvtVariant requested) noexcept;

/// Operation counter filled by gvt_matvec. `total_ops` accumulates over calls sharing the
/// same stats object, `last_ops` holds the count of the most recent call.
struct GvtStats {
    std::uint64_t total_ops{ 0 };
    std::uint64_t last_ops{ 0 };
    std::uint64_t calls{ 0 };
    GvtVariant last_variant{ GvtVariant::automatic };
    std::size_t last_intermediate_size{ 0 };

    void merge(const GvtStats &other) noexcept;
};

/// Throws std::invalid_argument on a vector length or id bound mismatch, before any work.
void validate_gvt_problem(const GvtProblem &problem, std::size_t vector_size);

[[nodiscard]] std::vector<double> gvt_matvec(const GvtProblem &problem, std::span<const double> v, GvtVariant variant = GvtVariant::automatic, GvtStats *stats = nullptr);

}  // namespace pairkern
