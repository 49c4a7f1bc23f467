#include "pairkern/base_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pairkern {

namespace {

void check_feature_dims(const DenseMatrix &x, const DenseMatrix &y, const char *who) {
    if (x.cols() != y.cols()) {
        throw std::invalid_argument(std::string(who) + ": feature dimension mismatch (" + std::to_string(x.cols()) + " vs " + std::to_string(y.cols()) + ")");
    }
}

}  // namespace

DenseMatrix linear_kernel(const DenseMatrix &x, const DenseMatrix &y) {
    check_feature_dims(x, y, "linear_kernel");
    DenseMatrix k(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto yj = y.row(j);
            double acc = 0.0;
            for (std::size_t f = 0; f < xi.size(); ++f) {
                acc += xi[f] * yj[f];
            }
            k(i, j) = acc;
        }
    }
    return k;
}

DenseMatrix gaussian_kernel(const DenseMatrix &x, const DenseMatrix &y, double gamma) {
    check_feature_dims(x, y, "gaussian_kernel");
    if (!(gamma > 0.0)) {
        throw std::invalid_argument("gaussian_kernel: gamma must be positive");
    }
    DenseMatrix k(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto yj = y.row(j);
            double sq = 0.0;
            for (std::size_t f = 0; f < xi.size(); ++f) {
                const double d = xi[f] - yj[f];
                sq += d * d;
            }
            k(i, j) = std::exp(-gamma * sq);
        }
    }
    return k;
}

DenseMatrix tanimoto_kernel(const DenseMatrix &x, const DenseMatrix &y) {
    check_feature_dims(x, y, "tanimoto_kernel");
    for (const DenseMatrix *m : { &x, &y }) {
        for (const double v : m->values()) {
            if (v != 0.0 && v != 1.0) {
                throw std::invalid_argument("tanimoto_kernel: non-binary feature value " + std::to_string(v));
            }
        }
    }
    DenseMatrix k(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto yj = y.row(j);
            double both = 0.0;
            double either = 0.0;
            for (std::size_t f = 0; f < xi.size(); ++f) {
                both += std::min(xi[f], yj[f]);
                either += std::max(xi[f], yj[f]);
            }
            k(i, j) = either == 0.0 ? 1.0 : both / either;
        }
    }
    return k;
}

std::string_view to_string(BaseKernelKind kind) noexcept {
    switch (kind) {
        case BaseKernelKind::linear:
            return "linear";
        case BaseKernelKind::gaussian:
            return "gaussian";
        case BaseKernelKind::tanimoto:
            return "tanimoto";
    }
    return "unknown";
}

std::optional<BaseKernelKind> parse_base_kernel(std::string_view name) noexcept {
    for (const auto kind : { BaseKernelKind::linear, BaseKernelKind::gaussian, BaseKernelKind::tanimoto }) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

DenseMatrix compute_base_kernel(const SideData &side, const BaseKernelConfig &config) {
    if (side.kind == SideKind::kernel) {
        return side.matrix;
    }
    switch (config.kind) {
        case BaseKernelKind::linear:
            return linear_kernel(side.matrix, side.matrix);
        case BaseKernelKind::gaussian:
            return gaussian_kernel(side.matrix, side.matrix, config.gamma);
        case BaseKernelKind::tanimoto:
            return tanimoto_kernel(side.matrix, side.matrix);
    }
    throw std::invalid_argument("compute_base_kernel: unknown base kernel");
}

}  // namespace pairkern
