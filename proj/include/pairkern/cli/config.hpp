#pragma once

#include "pairkern/base_kernels.hpp"
#include "pairkern/core_types.hpp"
#include "pairkern/evaluation.hpp"
#include "pairkern/pairwise_kernels.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace pairkern::cli {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Experiment description loaded from a JSON document. Relative paths resolve against the
/// directory of the config file. A missing or identical `target_side` means both sides share
/// the drug object table.
struct ExperimentConfig {
    std::filesystem::path interactions;
    std::filesystem::path drug_side;
    std::filesystem::path target_side;
    SideKind side_kind{ SideKind::features };
    BaseKernelConfig base_kernel;
    bool has_gamma{ false };
    PairwiseKernel pairwise_kernel{ PairwiseKernel::kronecker };
    Setting setting{ Setting::s1 };
    std::size_t folds{ 9 };
    double lambda{ 1e-5 };
    std::size_t patience{ 10 };
    std::optional<std::size_t> max_iter;
    double rel_tol{ 1e-8 };
    std::uint64_t seed{ 0 };
    std::filesystem::path output;

    [[nodiscard]] bool shared_object_table() const;
};

/// Throws ConfigError on unknown fields, wrong types, or invalid combinations.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json &doc, const std::filesystem::path &base_dir);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path &path);

/// Config echo for result documents.
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig &config);

[[nodiscard]] Dataset load_dataset(const ExperimentConfig &config);

[[nodiscard]] CrossValidationOptions cv_options(const ExperimentConfig &config);

}  // namespace pairkern::cli
