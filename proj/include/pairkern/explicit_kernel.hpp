#pragma once

#include "pairkern/core_types.hpp"
#include "pairkern/pairwise_kernels.hpp"

#include <span>
#include <vector>

namespace pairkern {

/// Fully materialized n_out x n_in pairwise kernel matrix. Reference path only: O(n_out * n_in)
/// memory and time.
struct ExplicitKernelMatrix {
    DenseMatrix matrix;
    PairwiseKernel kernel{ PairwiseKernel::kronecker };
    PairSample out_sample;
    PairSample in_sample;

    [[nodiscard]] std::size_t bytes() const noexcept { return matrix.size() * sizeof(double); }
};

[[nodiscard]] ExplicitKernelMatrix build_explicit(PairwiseKernel kernel, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in);

[[nodiscard]] std::vector<double> explicit_matvec(const ExplicitKernelMatrix &k, std::span<const double> v);
void explicit_matvec(const ExplicitKernelMatrix &k, std::span<const double> v, std::span<double> out);

}  // namespace pairkern
