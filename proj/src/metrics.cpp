#include "pairkern/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pairkern {

bool has_both_classes(std::span<const double> labels) noexcept {
    bool pos = false;
    bool neg = false;
    for (const double y : labels) {
        (y > 0.0 ? pos : neg) = true;
    }
    return pos && neg;
}

double auc(std::span<const double> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("auc: labels and scores differ in length");
    }
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Mann-Whitney U from midranks (1-based ranks, doubled to stay integral)
    double positive_rank_sum_x2 = 0.0;
    std::size_t positives = 0;
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && scores[order[end]] == scores[order[start]]) {
            ++end;
        }
        const double midrank_x2 = static_cast<double>(start + 1 + end);
        for (std::size_t k = start; k < end; ++k) {
            if (labels[order[k]] > 0.0) {
                positive_rank_sum_x2 += midrank_x2;
                ++positives;
            }
        }
        start = end;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("auc: both classes must be present");
    }
    const double p = static_cast<double>(positives);
    const double u = positive_rank_sum_x2 / 2.0 - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

}  // namespace pairkern
