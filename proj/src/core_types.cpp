#include "pairkern/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace pairkern {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill) :
    rows_{ rows },
    cols_{ cols },
    values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values) :
    rows_{ rows },
    cols_{ cols },
    values_{ std::move(values) } {
    if (values_.size() != rows_ * cols_) {
        throw std::invalid_argument("DenseMatrix: expected " + std::to_string(rows_ * cols_) + " values, got " + std::to_string(values_.size()));
    }
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = n_rows == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(n_rows * n_cols);
    for (const auto &r : rows) {
        if (r.size() != n_cols) {
            throw std::invalid_argument("DenseMatrix::from_rows: ragged rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return { n_rows, n_cols, std::move(values) };
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

bool DenseMatrix::is_symmetric(double tol) const {
    if (!is_square()) {
        return false;
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            const double a = (*this)(i, j);
            const double b = (*this)(j, i);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) {
                return false;
            }
        }
    }
    return true;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

PairSample::PairSample(std::vector<index_type> first_ids, std::vector<index_type> second_ids, bool homogeneous) :
    first_ids_{ std::move(first_ids) },
    second_ids_{ std::move(second_ids) },
    homogeneous_{ homogeneous } {
    if (first_ids_.size() != second_ids_.size()) {
        throw std::invalid_argument("PairSample: first and second id sequences differ in length");
    }
}

PairSample::PairSample(std::vector<index_type> first_ids, std::vector<index_type> second_ids, std::vector<double> labels, bool homogeneous) :
    PairSample(std::move(first_ids), std::move(second_ids), homogeneous) {
    if (labels.size() != first_ids_.size()) {
        throw std::invalid_argument("PairSample: label count does not match pair count");
    }
    labels_ = std::move(labels);
}

std::span<const double> PairSample::labels() const {
    if (!labels_) {
        throw std::logic_error("PairSample: sample has no labels");
    }
    return *labels_;
}

PairSample PairSample::subset(std::span<const std::size_t> indices) const {
    std::vector<index_type> first;
    std::vector<index_type> second;
    first.reserve(indices.size());
    second.reserve(indices.size());
    for (const std::size_t i : indices) {
        first.push_back(first_ids_.at(i));
        second.push_back(second_ids_.at(i));
    }
    if (!labels_) {
        return { std::move(first), std::move(second), homogeneous_ };
    }
    std::vector<double> y;
    y.reserve(indices.size());
    for (const std::size_t i : indices) {
        y.push_back((*labels_)[i]);
    }
    return { std::move(first), std::move(second), std::move(y), homogeneous_ };
}

CompactIds relabel_compact(std::span<const index_type> ids) {
    CompactIds out;
    out.compact.reserve(ids.size());
    std::unordered_map<index_type, index_type> position;
    for (const index_type id : ids) {
        const auto [it, inserted] = position.try_emplace(id, out.unique.size());
        if (inserted) {
            out.unique.push_back(id);
        }
        out.compact.push_back(it->second);
    }
    return out;
}

namespace {

void check_side(const SideData *side, std::size_t expected_count, const std::string &label, ValidationReport &report) {
    if (side == nullptr) {
        report.violations.push_back(label + " side data missing");
        return;
    }
    if (side->object_count() != expected_count) {
        report.violations.push_back(label + " count does not match side data rows");
    }
    if (!side->ids.empty() && side->ids.size() != side->object_count()) {
        report.violations.push_back(label + " id list does not match side data rows");
    }
    if (side->kind == SideKind::kernel) {
        if (!side->matrix.is_square()) {
            report.violations.push_back("non-square precomputed " + label + " kernel");
        } else if (!side->matrix.is_symmetric(1e-12)) {
            report.violations.push_back("asymmetric kernel (" + label + ")");
        }
    }
}

}  // namespace

ValidationReport validate_dataset(const Dataset &ds) {
    ValidationReport report;
    const PairSample &pairs = ds.pairs;

    if (!pairs.has_labels()) {
        report.violations.emplace_back("labels missing");
    }
    const auto first = pairs.first_ids();
    const auto second = pairs.second_ids();
    if (std::any_of(first.begin(), first.end(), [&](index_type id) { return id >= ds.drug_count; })) {
        report.violations.emplace_back("drug id out of range");
    }
    if (std::any_of(second.begin(), second.end(), [&](index_type id) { return id >= ds.target_count; })) {
        report.violations.emplace_back("target id out of range");
    }

    check_side(ds.drug_side.get(), ds.drug_count, "drug", report);
    if (ds.homogeneous()) {
        if (ds.target_side != ds.drug_side) {
            report.violations.emplace_back("homogeneous dataset requires a shared object table");
        }
        if (ds.target_count != ds.drug_count) {
            report.violations.emplace_back("homogeneous dataset requires equal drug and target counts");
        }
    } else {
        check_side(ds.target_side.get(), ds.target_count, "target", report);
    }
    return report;
}

}  // namespace pairkern
