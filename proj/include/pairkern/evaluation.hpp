#pragma once

#include "pairkern/base_kernels.hpp"
#include "pairkern/core_types.hpp"
#include "pairkern/metrics.hpp"
#include "pairkern/pairwise_kernels.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pairkern {

/// Cross-validation regimes by which objects of a test pair were seen in training:
/// 1 both, 2 drug only (novel target), 3 target only (novel drug), 4 neither.
enum class Setting : int { s1 = 1, s2 = 2, s3 = 3, s4 = 4 };

[[nodiscard]] std::optional<Setting> setting_from_int(int value) noexcept;

/// Partition of the pair indices of one sample. In setting 4, pairs sharing exactly one side
/// with the test block are neither trainable nor testable and land in `ignored`.
struct SplitPlan {
    Setting setting{ Setting::s1 };
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::vector<std::size_t> test;
    std::vector<std::size_t> ignored;
    std::uint64_t seed{ 0 };
    /// Objects held out of training (sorted). Empty on the sides a setting does not fold.
    std::vector<index_type> held_out_first;
    std::vector<index_type> held_out_second;
};

/// Fold `fold_index` of a `fold_count`-fold split. Settings 2 and 3 fold the unique second
/// (target) and first (drug) ids; setting 4 folds both into sqrt(fold_count) groups each and
/// enumerates the blocks as fold_index = drug_group * groups + target_group.
/// Throws std::invalid_argument when there are fewer objects than folds.
[[nodiscard]] SplitPlan split_setting(const PairSample &sample, Setting setting, std::size_t fold_count, std::size_t fold_index, std::uint64_t seed);

struct InnerSplit {
    std::vector<std::size_t> inner;
    std::vector<std::size_t> validation;
    /// setting 4 only: train pairs mixing inner and validation objects
    std::vector<std::size_t> discarded;
};

/// Splits training indices into inner and validation parts, holding out whole objects
/// according to the setting. `fraction` is the inner share.
[[nodiscard]] InnerSplit inner_split(const PairSample &sample, std::span<const std::size_t> train_indices, Setting setting, double fraction, std::uint64_t seed);

/// Checks the disjointness rules of a plan; returns human-readable violations.
[[nodiscard]] std::vector<std::string> check_split_plan(const PairSample &sample, const SplitPlan &plan);

struct CrossValidationOptions {
    Setting setting{ Setting::s1 };
    std::size_t folds{ 9 };
    double lambda{ 1e-5 };
    std::size_t patience{ 10 };
    std::optional<std::size_t> max_iter;
    double rel_tol{ 1e-8 };
    std::uint64_t seed{ 0 };
    double inner_fraction{ 0.75 };
    std::size_t jobs{ 1 };
};

struct FoldRecord {
    std::size_t fold{ 0 };
    std::optional<double> auc;
    std::size_t iterations{ 0 };
    double validation_auc{ 0.0 };
    std::size_t train_size{ 0 };
    std::size_t test_size{ 0 };
    std::size_t ignored_size{ 0 };
    double train_ms{ 0.0 };
    std::uint64_t gvt_ops{ 0 };
    /// set when the fold could not be evaluated
    std::string error;
};

struct CrossValidationReport {
    std::vector<FoldRecord> folds;
    /// over folds with an AUC; NaN when there are none
    double mean_auc{ 0.0 };
    double std_auc{ 0.0 };
    std::size_t evaluated_folds{ 0 };
};

/// Per fold: early stopping on an inner/validation split of the training part, refit on the
/// whole training part with the selected iteration count, AUC on the test part.
[[nodiscard]] CrossValidationReport cross_validate(const PairSample &pairs, const PairwiseKernelSpec &spec, const BaseKernels &kernels, const CrossValidationOptions &options);

[[nodiscard]] BaseKernels compute_base_kernels(const Dataset &ds, const BaseKernelConfig &config);

[[nodiscard]] CrossValidationReport cross_validate(const Dataset &ds, const PairwiseKernelSpec &spec, const BaseKernelConfig &base, const CrossValidationOptions &options);

enum class SyntheticPattern {
    /// label = parity(drug) XOR parity(target)
    chessboard,
    /// label = parity(drug) OR parity(target)
    tablecloth,
};

[[nodiscard]] std::optional<SyntheticPattern> parse_pattern(std::string_view name) noexcept;

/// Complete m x q grid with features [1, parity] on both sides. The seed permutes pair order.
[[nodiscard]] Dataset generate_synthetic(SyntheticPattern pattern, std::size_t drugs, std::size_t targets, std::uint64_t seed);

struct LowRankOptions {
    std::size_t drugs{ 40 };
    std::size_t targets{ 40 };
    std::size_t rank{ 3 };
    double density{ 0.3 };
    double feature_noise{ 0.5 };
    double identity_weight{ 1.0 };
    std::uint64_t seed{ 0 };
};

/// Sparse interactions thresholded from a rank-r factor model U V^T. Object features are
/// noisy copies of the latent factors followed by a scaled one-hot block, so seen objects
/// carry information beyond their features.
[[nodiscard]] Dataset generate_low_rank(const LowRankOptions &options);

}  // namespace pairkern
