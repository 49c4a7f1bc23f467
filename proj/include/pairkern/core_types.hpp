#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pairkern {

using index_type = std::size_t;

/// Dense row-major matrix of doubles. Houses base kernel matrices and feature tables.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
    [[nodiscard]] double &operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }

    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return { values_.data() + i * cols_, cols_ }; }
    [[nodiscard]] std::span<double> row(std::size_t i) noexcept { return { values_.data() + i * cols_, cols_ }; }

    [[nodiscard]] const std::vector<double> &values() const noexcept { return values_; }
    [[nodiscard]] const double *data() const noexcept { return values_.data(); }
    [[nodiscard]] double *data() noexcept { return values_.data(); }

    /// Symmetric when |M[i,j] - M[j,i]| <= tol * max(1, |M[i,j]|) everywhere.
    [[nodiscard]] bool is_symmetric(double tol = 1e-12) const;
    [[nodiscard]] DenseMatrix transposed() const;

    friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

  private:
    std::size_t rows_{ 0 };
    std::size_t cols_{ 0 };
    std::vector<double> values_;
};

struct Pair {
    index_type first;
    index_type second;

    friend bool operator==(const Pair &, const Pair &) = default;
};

/// A sequence of (first, second) object index pairs with optional labels.
/// Acts as the sampling operator selecting rows of a pairwise kernel operator.
class PairSample {
  public:
    PairSample() = default;
    PairSample(std::vector<index_type> first_ids, std::vector<index_type> second_ids, bool homogeneous = false);
    PairSample(std::vector<index_type> first_ids, std::vector<index_type> second_ids, std::vector<double> labels, bool homogeneous = false);

    [[nodiscard]] std::size_t size() const noexcept { return first_ids_.size(); }
    [[nodiscard]] bool empty() const noexcept { return first_ids_.empty(); }
    [[nodiscard]] bool homogeneous() const noexcept { return homogeneous_; }
    [[nodiscard]] bool has_labels() const noexcept { return labels_.has_value(); }

    [[nodiscard]] std::span<const index_type> first_ids() const noexcept { return first_ids_; }
    [[nodiscard]] std::span<const index_type> second_ids() const noexcept { return second_ids_; }
    [[nodiscard]] Pair pair(std::size_t i) const noexcept { return { first_ids_[i], second_ids_[i] }; }

    /// Throws std::logic_error when the sample is unlabeled.
    [[nodiscard]] std::span<const double> labels() const;

    [[nodiscard]] PairSample subset(std::span<const std::size_t> indices) const;

  private:
    std::vector<index_type> first_ids_;
    std::vector<index_type> second_ids_;
    std::optional<std::vector<double>> labels_;
    bool homogeneous_{ false };
};

enum class SideKind { features, kernel };

/// Per-object side information: a feature table (objects x features) or a precomputed kernel.
struct SideData {
    SideKind kind{ SideKind::features };
    DenseMatrix matrix;
    std::vector<std::string> ids;

    [[nodiscard]] std::size_t object_count() const noexcept { return matrix.rows(); }
};

/// Labeled pairs together with the drug and target object tables they index.
/// A homogeneous dataset shares one object table between both sides.
struct Dataset {
    PairSample pairs;
    std::size_t drug_count{ 0 };
    std::size_t target_count{ 0 };
    std::shared_ptr<const SideData> drug_side;
    std::shared_ptr<const SideData> target_side;

    [[nodiscard]] bool homogeneous() const noexcept { return pairs.homogeneous(); }
};

struct CompactIds {
    std::vector<index_type> compact;
    std::vector<index_type> unique;

    [[nodiscard]] std::size_t unique_count() const noexcept { return unique.size(); }
};

/// Maps arbitrary ids onto [0, unique_count) in first-occurrence order.
[[nodiscard]] CompactIds relabel_compact(std::span<const index_type> ids);

struct ValidationReport {
    std::vector<std::string> violations;

    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

[[nodiscard]] ValidationReport validate_dataset(const Dataset &ds);

}  // namespace pairkern
