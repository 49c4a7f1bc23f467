#pragma once

#include "pairkern/core_types.hpp"
#include "pairkern/gvt.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pairkern {

enum class PairwiseKernel { linear, poly2d, kronecker, cartesian, symmetric, anti_symmetric, ranking, mlpk };

inline constexpr PairwiseKernel all_pairwise_kernels[] = {
    PairwiseKernel::linear, PairwiseKernel::poly2d, PairwiseKernel::kronecker, PairwiseKernel::cartesian,
    PairwiseKernel::symmetric, PairwiseKernel::anti_symmetric, PairwiseKernel::ranking, PairwiseKernel::mlpk,
};

[[nodiscard]] std::string_view to_string(PairwiseKernel kernel) noexcept;
[[nodiscard]] std::optional<PairwiseKernel> parse_pairwise_kernel(std::string_view name) noexcept;

/// Symmetric, anti-symmetric, ranking and MLPK kernels compare two objects of one domain.
[[nodiscard]] bool requires_homogeneous(PairwiseKernel kernel) noexcept;

/// Base operator a Kronecker factor resolves to.
enum class FactorKind {
    drug,
    target,
    /// all-ones operator
    ones,
    /// delta(a = b) over object ids
    identity,
};

/// Picks one element of a pair. Swapping selectors realizes the commutation operator,
/// duplicating one selector into both slots realizes the unification operator.
enum class ElementSelector { first, second };

[[nodiscard]] constexpr index_type select(ElementSelector sel, const Pair &p) noexcept {
    return sel == ElementSelector::first ? p.first : p.second;
}

/// One summand `coefficient * L[row_left(x), col_left(z)] * R[row_right(x), col_right(z)]`
/// of a pairwise kernel k(x, z), x taken from the output (row) sample and z from the input
/// (column) sample.
struct KernelTerm {
    double coefficient{ 1.0 };
    FactorKind left_factor{ FactorKind::drug };
    FactorKind right_factor{ FactorKind::target };
    ElementSelector row_sel_left{ ElementSelector::first };
    ElementSelector row_sel_right{ ElementSelector::second };
    ElementSelector col_sel_left{ ElementSelector::first };
    ElementSelector col_sel_right{ ElementSelector::second };

    friend bool operator==(const KernelTerm &, const KernelTerm &) = default;
};

struct PairwiseKernelSpec {
    PairwiseKernel name{ PairwiseKernel::kronecker };
    std::vector<KernelTerm> terms;
    bool requires_homogeneous{ false };
};

/// Sum-of-Kronecker-products form of a pairwise kernel.
[[nodiscard]] PairwiseKernelSpec decompose(PairwiseKernel kernel);
/// Throws std::invalid_argument for an unknown kernel name.
[[nodiscard]] PairwiseKernelSpec decompose(std::string_view name);

/// Drug and target base kernel matrices over all objects. `target` is null for a shared
/// (homogeneous) object table, in which case the drug kernel serves both sides.
struct BaseKernels {
    std::shared_ptr<const DenseMatrix> drug;
    std::shared_ptr<const DenseMatrix> target;

    [[nodiscard]] const DenseMatrix &drug_matrix() const { return *drug; }
    [[nodiscard]] const DenseMatrix *target_matrix() const noexcept { return target.get(); }
};

/// Throws std::invalid_argument when a homogeneous kernel meets heterogeneous samples or a
/// separate target kernel, or when sample ids exceed the base kernel bounds.
void check_kernel_inputs(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in);

/**
 * Matrix-free pairwise kernel operator R_out K R_in^T.
 *
 * Construction resolves every term into a compact GVT problem (relabeled ids and the base
 * kernel sub-blocks they touch); apply() then costs one gvt_matvec per term. Sub-blocks
 * and relabelings are shared between terms that index them identically.
 */
class PairwiseOperator {
  public:
    PairwiseOperator(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t term_count() const noexcept { return terms_.size(); }

    [[nodiscard]] std::vector<double> apply(std::span<const double> v, GvtStats *stats = nullptr) const;
    void apply(std::span<const double> v, std::span<double> out, GvtStats *stats = nullptr) const;

    /// Bytes held in resolved factor blocks.
    [[nodiscard]] std::size_t factor_bytes() const noexcept;

  private:
    struct ResolvedTerm {
        double coefficient;
        std::shared_ptr<const DenseMatrix> first_factor;
        std::shared_ptr<const DenseMatrix> second_factor;
        std::shared_ptr<const std::vector<index_type>> out_first;
        std::shared_ptr<const std::vector<index_type>> out_second;
        std::shared_ptr<const std::vector<index_type>> in_first;
        std::shared_ptr<const std::vector<index_type>> in_second;
    };

    std::size_t rows_{ 0 };
    std::size_t cols_{ 0 };
    std::vector<ResolvedTerm> terms_;
};

[[nodiscard]] std::vector<double> pairwise_matvec(const PairwiseKernelSpec &spec, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in, std::span<const double> v, GvtStats *stats = nullptr);

/// Direct evaluation of k(a, b) from the closed-form kernel function, independent of the
/// term decomposition. `a` is the row (output) pair, `b` the column (input) pair.
[[nodiscard]] double kernel_value(PairwiseKernel kernel, const DenseMatrix &drug, const DenseMatrix *target, const Pair &a, const Pair &b);

}  // namespace pairkern
