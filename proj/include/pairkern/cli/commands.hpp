#pragma once

#include "pairkern/cli/config.hpp"
#include "pairkern/evaluation.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pairkern::cli {

struct GenerateOptions {
    SyntheticPattern pattern{ SyntheticPattern::chessboard };
    std::size_t drugs{ 20 };
    std::size_t targets{ 20 };
    std::uint64_t seed{ 0 };
    std::filesystem::path out_dir;
};

/// Writes interactions.csv, drugs.csv, targets.csv and a starter config.json.
void generate_files(const GenerateOptions &options);

/// Runs cross-validation and writes the line-delimited results document.
void run_experiment(const ExperimentConfig &config, std::size_t jobs, std::ostream &results);

enum class BenchmarkBackend { gvt, explicit_matrix, both };

struct BenchmarkOptions {
    std::vector<std::size_t> sizes;
    BenchmarkBackend backend{ BenchmarkBackend::both };
    std::size_t iterations{ 20 };
    std::size_t matvec_repeats{ 5 };
    std::uint64_t memory_budget_bytes{ std::uint64_t{ 2 } << 30 };
};

struct BenchmarkRow {
    std::size_t n{ 0 };
    std::size_t m{ 0 };
    std::size_t q{ 0 };
    std::string backend;
    std::string status;
    double matvec_ms{ 0.0 };
    double fit_ms{ 0.0 };
    std::uint64_t peak_kernel_bytes{ 0 };
    /// multiply-adds of one kernel matvec
    std::uint64_t matvec_ops{ 0 };
    /// GVT multiply-adds over the whole fit (0 for the explicit backend)
    std::uint64_t gvt_ops{ 0 };
    std::size_t iterations{ 0 };
    std::optional<double> dual_max_rel_diff;
    std::string reason;
};

/// Memory budget for explicit kernels, overridable through PAIRKERN_EXPLICIT_BUDGET_BYTES.
[[nodiscard]] std::uint64_t memory_budget_from_env(std::uint64_t fallback);

[[nodiscard]] std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig &config, const Dataset &ds, const BenchmarkOptions &options);

void write_benchmark_csv(std::ostream &out, const std::vector<BenchmarkRow> &rows);

/// Entry point shared by the executable and the tests. Returns the process exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace pairkern::cli
