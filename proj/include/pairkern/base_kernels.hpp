#pragma once

#include "pairkern/core_types.hpp"

#include <optional>
#include <string_view>

namespace pairkern {

/// K[i,j] = <x_i, y_j>.
[[nodiscard]] DenseMatrix linear_kernel(const DenseMatrix &x, const DenseMatrix &y);

/// K[i,j] = exp(-gamma * ||x_i - y_j||^2). Requires gamma > 0.
[[nodiscard]] DenseMatrix gaussian_kernel(const DenseMatrix &x, const DenseMatrix &y, double gamma);

/// MinMax similarity of binary fingerprints: |x_i AND y_j| / |x_i OR y_j|.
/// Two all-zero vectors have similarity 1.
[[nodiscard]] DenseMatrix tanimoto_kernel(const DenseMatrix &x, const DenseMatrix &y);

enum class BaseKernelKind { linear, gaussian, tanimoto };

[[nodiscard]] std::string_view to_string(BaseKernelKind kind) noexcept;
[[nodiscard]] std::optional<BaseKernelKind> parse_base_kernel(std::string_view name) noexcept;

struct BaseKernelConfig {
    BaseKernelKind kind{ BaseKernelKind::linear };
    double gamma{ 1e-5 };
};

/// Kernel over all objects of one side. Precomputed kernels pass through unchanged.
[[nodiscard]] DenseMatrix compute_base_kernel(const SideData &side, const BaseKernelConfig &config);

}  // namespace pairkern
