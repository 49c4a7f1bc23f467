#include "pairkern/evaluation.hpp"

#include "pairkern/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>

namespace pairkern {

std::optional<Setting> setting_from_int(int value) noexcept {
    if (value >= 1 && value <= 4) {
        return static_cast<Setting>(value);
    }
    return std::nullopt;
}

namespace {

std::vector<index_type> sorted_unique(std::span<const index_type> ids) {
    std::vector<index_type> out(ids.begin(), ids.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Returns the ids of group `group` out of `groups` after a seeded shuffle.
std::vector<index_type> held_out_group(std::vector<index_type> objects, std::size_t groups, std::size_t group, std::mt19937_64 &rng, const char *what) {
    if (objects.size() < groups) {
        throw std::invalid_argument(std::string("split: ") + std::to_string(objects.size()) + " unique " + what + " ids cannot fill " + std::to_string(groups) + " folds");
    }
    std::shuffle(objects.begin(), objects.end(), rng);
    const std::size_t count = objects.size();
    std::vector<index_type> out;
    for (std::size_t p = 0; p < count; ++p) {
        if (p * groups / count == group) {
            out.push_back(objects[p]);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool contains(const std::vector<index_type> &sorted, index_type id) {
    return std::binary_search(sorted.begin(), sorted.end(), id);
}

std::size_t checked_sqrt(std::size_t n) {
    const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (r * r != n) {
        throw std::invalid_argument("split: setting 4 needs a perfect-square fold count, got " + std::to_string(n));
    }
    return r;
}

std::size_t inner_count(std::size_t total, double fraction) {
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
    return std::clamp<std::size_t>(k, 1, total - 1);
}

}  // namespace

SplitPlan split_setting(const PairSample &sample, Setting setting, std::size_t fold_count, std::size_t fold_index, std::uint64_t seed) {
    if (fold_count < 2) {
        throw std::invalid_argument("split: fold count must be at least 2");
    }
    if (fold_index >= fold_count) {
        throw std::invalid_argument("split: fold index out of range");
    }
    SplitPlan plan;
    plan.setting = setting;
    plan.seed = seed;
    std::mt19937_64 rng(seed);
    const std::size_t n = sample.size();

    switch (setting) {
        case Setting::s1: {
            if (n < fold_count) {
                throw std::invalid_argument("split: " + std::to_string(n) + " pairs cannot fill " + std::to_string(fold_count) + " folds");
            }
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{ 0 });
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t p = 0; p < n; ++p) {
                (p * fold_count / n == fold_index ? plan.test : plan.train).push_back(order[p]);
            }
            std::sort(plan.train.begin(), plan.train.end());
            std::sort(plan.test.begin(), plan.test.end());
            return plan;
        }
        case Setting::s2:
            plan.held_out_second = held_out_group(sorted_unique(sample.second_ids()), fold_count, fold_index, rng, "target");
            break;
        case Setting::s3:
            plan.held_out_first = held_out_group(sorted_unique(sample.first_ids()), fold_count, fold_index, rng, "drug");
            break;
        case Setting::s4: {
            const std::size_t groups = checked_sqrt(fold_count);
            plan.held_out_first = held_out_group(sorted_unique(sample.first_ids()), groups, fold_index / groups, rng, "drug");
            plan.held_out_second = held_out_group(sorted_unique(sample.second_ids()), groups, fold_index % groups, rng, "target");
            break;
        }
    }

    const bool fold_first = !plan.held_out_first.empty();
    const bool fold_second = !plan.held_out_second.empty();
    for (std::size_t i = 0; i < n; ++i) {
        const bool first_out = fold_first && contains(plan.held_out_first, sample.first_ids()[i]);
        const bool second_out = fold_second && contains(plan.held_out_second, sample.second_ids()[i]);
        const bool is_test = (!fold_first || first_out) && (!fold_second || second_out);
        const bool is_train = !first_out && !second_out;
        if (is_test) {
            plan.test.push_back(i);
        } else if (is_train) {
            plan.train.push_back(i);
        } else {
            plan.ignored.push_back(i);
        }
    }
    return plan;
}

InnerSplit inner_split(const PairSample &sample, std::span<const std::size_t> train_indices, Setting setting, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("inner_split: fraction must lie in (0, 1)");
    }
    std::mt19937_64 rng(seed);
    InnerSplit split;

    if (setting == Setting::s1) {
        if (train_indices.size() < 2) {
            throw std::invalid_argument("inner_split: too few pairs to split");
        }
        std::vector<std::size_t> order(train_indices.begin(), train_indices.end());
        std::sort(order.begin(), order.end());
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t k = inner_count(order.size(), fraction);
        split.inner.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        split.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
        std::sort(split.inner.begin(), split.inner.end());
        std::sort(split.validation.begin(), split.validation.end());
        return split;
    }

    auto inner_objects = [&](bool first_side) {
        std::vector<index_type> ids;
        ids.reserve(train_indices.size());
        for (const std::size_t i : train_indices) {
            ids.push_back(first_side ? sample.first_ids()[i] : sample.second_ids()[i]);
        }
        std::vector<index_type> objects = sorted_unique(ids);
        if (objects.size() < 2) {
            throw std::invalid_argument(std::string("inner_split: too few ") + (first_side ? "drugs" : "targets") + " to split");
        }
        std::shuffle(objects.begin(), objects.end(), rng);
        objects.resize(inner_count(objects.size(), fraction));
        std::sort(objects.begin(), objects.end());
        return objects;
    };

    const bool split_first = setting == Setting::s3 || setting == Setting::s4;
    const bool split_second = setting == Setting::s2 || setting == Setting::s4;
    const std::vector<index_type> inner_first = split_first ? inner_objects(true) : std::vector<index_type>{};
    const std::vector<index_type> inner_second = split_second ? inner_objects(false) : std::vector<index_type>{};

    for (const std::size_t i : train_indices) {
        const bool first_in = !split_first || contains(inner_first, sample.first_ids()[i]);
        const bool second_in = !split_second || contains(inner_second, sample.second_ids()[i]);
        const bool first_val = split_first && !first_in;
        const bool second_val = split_second && !second_in;
        if (first_in && second_in) {
            split.inner.push_back(i);
        } else if ((first_val || !split_first) && (second_val || !split_second)) {
            split.validation.push_back(i);
        } else {
            split.discarded.push_back(i);
        }
    }
    std::sort(split.inner.begin(), split.inner.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.discarded.begin(), split.discarded.end());
    return split;
}

std::vector<std::string> check_split_plan(const PairSample &sample, const SplitPlan &plan) {
    std::vector<std::string> violations;
    const std::size_t n = sample.size();
    std::vector<int> seen(n, 0);
    for (const auto *part : { &plan.train, &plan.validation, &plan.test, &plan.ignored }) {
        for (const std::size_t i : *part) {
            if (i >= n) {
                violations.push_back("index " + std::to_string(i) + " out of range");
                continue;
            }
            ++seen[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i] != 1) {
            violations.push_back("pair " + std::to_string(i) + " assigned " + std::to_string(seen[i]) + " times");
        }
    }

    const bool rule_first = plan.setting == Setting::s3 || plan.setting == Setting::s4;
    const bool rule_second = plan.setting == Setting::s2 || plan.setting == Setting::s4;
    auto check_disjoint = [&](bool first_side) {
        std::set<index_type> test_objects;
        for (const std::size_t i : plan.test) {
            test_objects.insert(first_side ? sample.first_ids()[i] : sample.second_ids()[i]);
        }
        for (const auto *part : { &plan.train, &plan.validation }) {
            for (const std::size_t i : *part) {
                const index_type id = first_side ? sample.first_ids()[i] : sample.second_ids()[i];
                if (test_objects.contains(id)) {
                    violations.push_back(std::string("test ") + (first_side ? "drug " : "target ") + std::to_string(id) + " also appears in training pair " + std::to_string(i));
                }
            }
        }
    };
    if (rule_first) {
        check_disjoint(true);
    }
    if (rule_second) {
        check_disjoint(false);
    }
    if (plan.setting == Setting::s4) {
        // pairs mixing inner and validation objects may also be set aside; such a pair can
        // not have both objects on the inner side, nor both on the validation side
        std::set<index_type> val_first;
        std::set<index_type> val_second;
        std::set<index_type> inner_first;
        std::set<index_type> inner_second;
        for (const std::size_t i : plan.validation) {
            val_first.insert(sample.first_ids()[i]);
            val_second.insert(sample.second_ids()[i]);
        }
        for (const std::size_t i : plan.train) {
            inner_first.insert(sample.first_ids()[i]);
            inner_second.insert(sample.second_ids()[i]);
        }
        for (const std::size_t i : plan.ignored) {
            const index_type d = sample.first_ids()[i];
            const index_type t = sample.second_ids()[i];
            const bool first_out = contains(plan.held_out_first, d);
            const bool second_out = contains(plan.held_out_second, t);
            const bool mixed_inner = !first_out && !second_out && !(inner_first.contains(d) && inner_second.contains(t))
                                     && !(val_first.contains(d) && val_second.contains(t));
            if (first_out == second_out && !mixed_inner) {
                violations.push_back("ignored pair " + std::to_string(i) + " does not share exactly one side with the test block");
            }
        }
    } else if (!plan.ignored.empty()) {
        violations.emplace_back("only setting 4 may ignore pairs");
    }
    return violations;
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

FoldRecord run_fold(const PairSample &pairs, const PairwiseKernelSpec &spec, const BaseKernels &kernels, const CrossValidationOptions &options, std::size_t fold) {
    FoldRecord record;
    record.fold = fold;
    try {
        const SplitPlan plan = split_setting(pairs, options.setting, options.folds, fold, options.seed);
        record.train_size = plan.train.size();
        record.test_size = plan.test.size();
        record.ignored_size = plan.ignored.size();

        const PairSample train = pairs.subset(plan.train);
        const PairSample test = pairs.subset(plan.test);
        if (!has_both_classes(test.labels())) {
            throw std::invalid_argument("degenerate test labels");
        }
        const std::uint64_t inner_seed = options.seed ^ (0x9e3779b97f4a7c15ULL * (fold + 1));
        const InnerSplit split = inner_split(pairs, plan.train, options.setting, options.inner_fraction, inner_seed);
        const PairSample inner = pairs.subset(split.inner);
        const PairSample validation = pairs.subset(split.validation);

        GvtStats stats;
        const auto start = std::chrono::steady_clock::now();
        const EarlyStoppingResult stopping = fit_early_stopping(inner, validation, spec, kernels, options.lambda, options.patience, options.max_iter, &stats);

        RidgeOptions refit;
        refit.lambda = options.lambda;
        refit.max_iter = stopping.best_iterations;
        refit.rel_tol = options.rel_tol;
        const Model model = ridge_fit(train, spec, kernels, refit, &stats);
        record.train_ms = elapsed_ms(start);

        const std::vector<double> scores = predict(model, test, &stats);
        record.auc = auc(test.labels(), scores);
        record.iterations = stopping.best_iterations;
        record.validation_auc = stopping.best_validation_auc;
        record.gvt_ops = stats.total_ops;
    } catch (const std::exception &e) {
        record.error = e.what();
    }
    return record;
}

}  // namespace

CrossValidationReport cross_validate(const PairSample &pairs, const PairwiseKernelSpec &spec, const BaseKernels &kernels, const CrossValidationOptions &options) {
    if (!pairs.has_labels()) {
        throw std::invalid_argument("cross_validate: pairs must be labeled");
    }
    CrossValidationReport report;
    report.folds.resize(options.folds);

    const std::size_t workers = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(options.folds, 1));
    if (workers == 1) {
        for (std::size_t fold = 0; fold < options.folds; ++fold) {
            report.folds[fold] = run_fold(pairs, spec, kernels, options, fold);
        }
    } else {
        std::atomic<std::size_t> next{ 0 };
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t fold = next++; fold < options.folds; fold = next++) {
                    report.folds[fold] = run_fold(pairs, spec, kernels, options, fold);
                }
            });
        }
    }

    std::vector<double> aucs;
    for (const FoldRecord &r : report.folds) {
        if (r.auc) {
            aucs.push_back(*r.auc);
        }
    }
    report.evaluated_folds = aucs.size();
    if (aucs.empty()) {
        report.mean_auc = std::numeric_limits<double>::quiet_NaN();
        report.std_auc = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    const double mean = std::accumulate(aucs.begin(), aucs.end(), 0.0) / static_cast<double>(aucs.size());
    double sq = 0.0;
    for (const double a : aucs) {
        sq += (a - mean) * (a - mean);
    }
    report.mean_auc = mean;
    report.std_auc = aucs.size() > 1 ? std::sqrt(sq / static_cast<double>(aucs.size() - 1)) : 0.0;
    return report;
}

BaseKernels compute_base_kernels(const Dataset &ds, const BaseKernelConfig &config) {
    if (!ds.drug_side) {
        throw std::invalid_argument("compute_base_kernels: drug side data missing");
    }
    BaseKernels kernels;
    kernels.drug = std::make_shared<const DenseMatrix>(compute_base_kernel(*ds.drug_side, config));
    if (!ds.homogeneous()) {
        if (!ds.target_side) {
            throw std::invalid_argument("compute_base_kernels: target side data missing");
        }
        kernels.target = std::make_shared<const DenseMatrix>(compute_base_kernel(*ds.target_side, config));
    }
    return kernels;
}

CrossValidationReport cross_validate(const Dataset &ds, const PairwiseKernelSpec &spec, const BaseKernelConfig &base, const CrossValidationOptions &options) {
    const ValidationReport valid = validate_dataset(ds);
    if (!valid.ok()) {
        throw std::invalid_argument("cross_validate: invalid dataset: " + valid.violations.front());
    }
    return cross_validate(ds.pairs, spec, compute_base_kernels(ds, base), options);
}

std::optional<SyntheticPattern> parse_pattern(std::string_view name) noexcept {
    if (name == "chessboard") {
        return SyntheticPattern::chessboard;
    }
    if (name == "tablecloth") {
        return SyntheticPattern::tablecloth;
    }
    return std::nullopt;
}

namespace {

std::shared_ptr<const SideData> parity_features(std::size_t count, char prefix) {
    SideData side;
    side.kind = SideKind::features;
    side.matrix = DenseMatrix(count, 2);
    for (std::size_t i = 0; i < count; ++i) {
        side.matrix(i, 0) = 1.0;
        side.matrix(i, 1) = static_cast<double>(i % 2);
        side.ids.push_back(prefix + std::to_string(i));
    }
    return std::make_shared<const SideData>(std::move(side));
}

}  // namespace

Dataset generate_synthetic(SyntheticPattern pattern, std::size_t drugs, std::size_t targets, std::uint64_t seed) {
    if (drugs < 2 || targets < 2) {
        throw std::invalid_argument("generate_synthetic: need at least 2 drugs and 2 targets");
    }
    std::vector<std::size_t> order(drugs * targets);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<index_type> first;
    std::vector<index_type> second;
    std::vector<double> labels;
    for (const std::size_t cell : order) {
        const index_type d = cell / targets;
        const index_type t = cell % targets;
        const bool pd = d % 2 == 1;
        const bool pt = t % 2 == 1;
        const bool label = pattern == SyntheticPattern::chessboard ? (pd != pt) : (pd || pt);
        first.push_back(d);
        second.push_back(t);
        labels.push_back(label ? 1.0 : 0.0);
    }

    Dataset ds;
    ds.pairs = PairSample(std::move(first), std::move(second), std::move(labels));
    ds.drug_count = drugs;
    ds.target_count = targets;
    ds.drug_side = parity_features(drugs, 'd');
    ds.target_side = parity_features(targets, 't');
    return ds;
}

Dataset generate_low_rank(const LowRankOptions &options) {
    const std::size_t m = options.drugs;
    const std::size_t q = options.targets;
    const std::size_t r = options.rank;
    if (m < 2 || q < 2 || r == 0) {
        throw std::invalid_argument("generate_low_rank: need at least 2 drugs, 2 targets and rank 1");
    }
    if (!(options.density > 0.0 && options.density <= 1.0)) {
        throw std::invalid_argument("generate_low_rank: density must lie in (0, 1]");
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    DenseMatrix u(m, r);
    DenseMatrix v(q, r);
    for (double &x : std::span<double>(u.data(), u.size())) {
        x = normal(rng);
    }
    for (double &x : std::span<double>(v.data(), v.size())) {
        x = normal(rng);
    }

    auto features = [&](const DenseMatrix &latent, char prefix) {
        const std::size_t count = latent.rows();
        SideData side;
        side.kind = SideKind::features;
        side.matrix = DenseMatrix(count, r + count);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t k = 0; k < r; ++k) {
                side.matrix(i, k) = latent(i, k) + options.feature_noise * normal(rng);
            }
            side.matrix(i, r + i) = options.identity_weight;
            side.ids.push_back(prefix + std::to_string(i));
        }
        return std::make_shared<const SideData>(std::move(side));
    };

    std::vector<std::size_t> cells(m * q);
    std::iota(cells.begin(), cells.end(), std::size_t{ 0 });
    std::shuffle(cells.begin(), cells.end(), rng);
    const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(options.density * static_cast<double>(m * q))));
    cells.resize(keep);
    std::sort(cells.begin(), cells.end());

    std::vector<index_type> first;
    std::vector<index_type> second;
    std::vector<double> labels;
    for (const std::size_t cell : cells) {
        const index_type d = cell / q;
        const index_type t = cell % q;
        double score = 0.0;
        for (std::size_t k = 0; k < r; ++k) {
            score += u(d, k) * v(t, k);
        }
        first.push_back(d);
        second.push_back(t);
        labels.push_back(score > 0.0 ? 1.0 : 0.0);
    }

    Dataset ds;
    ds.pairs = PairSample(std::move(first), std::move(second), std::move(labels));
    ds.drug_count = m;
    ds.target_count = q;
    ds.drug_side = features(u, 'd');
    ds.target_side = features(v, 't');
    return ds;
}

}  // namespace pairkern
