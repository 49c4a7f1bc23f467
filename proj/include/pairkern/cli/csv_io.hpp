#pragma once

#include "pairkern/core_types.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace pairkern::cli {

/// Rows of an interactions file: header `drug_id,target_id,label`.
struct Interactions {
    std::vector<std::string> drug_ids;
    std::vector<std::string> target_ids;
    std::vector<double> labels;
};

/// Parsing errors carry `file:line` context.
class CsvError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] Interactions read_interactions(const std::filesystem::path &path);

/// Feature table: header row whose first column is `id`, then numeric columns.
[[nodiscard]] SideData read_feature_table(const std::filesystem::path &path);

/// Square kernel table: first row and first column hold object ids (same order), symmetric.
[[nodiscard]] SideData read_kernel_table(const std::filesystem::path &path);

/// Resolves string ids against the object tables. Pass the same pointer twice for a shared
/// (homogeneous) table.
[[nodiscard]] Dataset assemble_dataset(const Interactions &rows, std::shared_ptr<const SideData> drug_side, std::shared_ptr<const SideData> target_side);

/// Shortest round-trip decimal representation, locale independent.
[[nodiscard]] std::string format_number(double value);

void write_interactions(const std::filesystem::path &path, const Dataset &ds);
void write_feature_table(const std::filesystem::path &path, const SideData &side);

}  // namespace pairkern::cli
