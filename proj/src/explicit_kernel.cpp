#include "pairkern/explicit_kernel.hpp"

#include <stdexcept>
#include <string>

namespace pairkern {

ExplicitKernelMatrix build_explicit(PairwiseKernel kernel, const DenseMatrix &drug, const DenseMatrix *target, const PairSample &out, const PairSample &in) {
    check_kernel_inputs(decompose(kernel), drug, target, out, in);
    DenseMatrix k(out.size(), in.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Pair a = out.pair(i);
        for (std::size_t j = 0; j < in.size(); ++j) {
            k(i, j) = kernel_value(kernel, drug, target, a, in.pair(j));
        }
    }
    return { std::move(k), kernel, out, in };
}

void explicit_matvec(const ExplicitKernelMatrix &k, std::span<const double> v, std::span<double> out) {
    const DenseMatrix &m = k.matrix;
    if (v.size() != m.cols()) {
        throw std::invalid_argument("explicit_matvec: vector length " + std::to_string(v.size()) + " does not match " + std::to_string(m.cols()) + " columns");
    }
    if (out.size() != m.rows()) {
        throw std::invalid_argument("explicit_matvec: output length mismatch");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            acc += row[j] * v[j];
        }
        out[i] = acc;
    }
}

std::vector<double> explicit_matvec(const ExplicitKernelMatrix &k, std::span<const double> v) {
    std::vector<double> out(k.matrix.rows());
    explicit_matvec(k, v, out);
    return out;
}

}  // namespace pairkern
