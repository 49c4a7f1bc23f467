#pragma once

#include <span>

namespace pairkern {

/// Area under the ROC curve: the probability that a random positive scores above a random
/// negative, ties counting one half. Labels > 0 are positives.
/// Throws std::invalid_argument if either class is absent or the lengths differ.
[[nodiscard]] double auc(std::span<const double> labels, std::span<const double> scores);

/// True when both classes are present.
[[nodiscard]] bool has_both_classes(std::span<const double> labels) noexcept;

}  // namespace pairkern
