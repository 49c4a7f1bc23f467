// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "pairkern/evaluation.hpp"
#include "pairkern/explicit_kernel.hpp"
#include "pairkern/gvt.hpp"
#include "pairkern/metrics.hpp"
#include "pairkern/solver.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

using namespace pairkern;
using testing::rel_error;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

struct Outcome {
    bool pass{ true };
    std::ostringstream detail;

    void fail(const std::string &why) {
        if (pass) {
            detail << "first failure: " << why << "; ";
        }
        pass = false;
    }
};

BaseKernels kernels_of(const testing::KernelInstance &inst) {
    BaseKernels k;
    k.drug = std::make_shared<const DenseMatrix>(inst.drug.kernel);
    if (inst.target) {
        k.target = std::make_shared<const DenseMatrix>(inst.target->kernel);
    }
    return k;
}

PairSample labeled(const PairSample &s, std::vector<double> y) {
    return { std::vector<index_type>(s.first_ids().begin(), s.first_ids().end()), std::vector<index_type>(s.second_ids().begin(), s.second_ids().end()), std::move(y), s.homogeneous() };
}

void oracle_equivalence(Outcome &o) {
    const auto start = clock_type::now();
    testing::Rng rng(1001);
    double worst = 0.0;
    std::size_t homogeneous = 0, heterogeneous = 0;
    for (const auto kernel : all_pairwise_kernels) {
        const auto spec = decompose(kernel);
        for (int trial = 0; trial < 200; ++trial) {
            auto inst = testing::random_instance(kernel, rng, 6, 20);
            while (inst.out.first_ids().size() == inst.in.first_ids().size() && std::equal(inst.out.first_ids().begin(), inst.out.first_ids().end(), inst.in.first_ids().begin())
                   && std::equal(inst.out.second_ids().begin(), inst.out.second_ids().end(), inst.in.second_ids().begin())) {
                inst = testing::random_instance(kernel, rng, 6, 20);
            }
            (inst.target ? heterogeneous : homogeneous) += 1;
            const auto fast = pairwise_matvec(spec, inst.drug.kernel, inst.target_matrix(), inst.out, inst.in, inst.v);
            const auto slow = explicit_matvec(build_explicit(kernel, inst.drug.kernel, inst.target_matrix(), inst.out, inst.in), inst.v);
            const double err = rel_error(fast, slow);
            worst = std::max(worst, err);
            if (!(err <= 1e-10)) {
                o.fail(std::string(to_string(kernel)) + " trial " + std::to_string(trial) + " rel error " + std::to_string(err));
            }
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 10.0) {
        o.fail("runtime " + std::to_string(elapsed) + " s");
    }
    o.detail << "1600 instances (" << heterogeneous << " heterogeneous, " << homogeneous << " homogeneous), worst rel error " << worst << ", " << elapsed << " s";
}

// Median seconds per call over repeated batches.
double median_seconds(const std::function<void()> &call, int batches, int calls_per_batch) {
    std::vector<double> t;
    for (int b = 0; b < batches; ++b) {
        const auto start = clock_type::now();
        for (int c = 0; c < calls_per_batch; ++c) {
            call();
        }
        t.push_back(seconds_since(start) / calls_per_batch);
    }
    std::sort(t.begin(), t.end());
    return t[t.size() / 2];
}

void complexity_contract(Outcome &o) {
    testing::Rng rng(2002);
    // exact counter on every call: raw problems of all shapes and every kernel term
    std::size_t calls = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m_out = testing::draw(rng, 1, 9), m_in = testing::draw(rng, 1, 9), q_out = testing::draw(rng, 1, 9), q_in = testing::draw(rng, 1, 9);
        const auto a = testing::uniform_matrix(rng, m_out, m_in);
        const auto b = testing::uniform_matrix(rng, q_out, q_in);
        std::vector<index_type> of, os, inf, ins;
        for (std::size_t i = 0, n = testing::draw(rng, 0, 30); i < n; ++i) {
            of.push_back(testing::draw(rng, 0, m_out - 1));
            os.push_back(testing::draw(rng, 0, q_out - 1));
        }
        for (std::size_t j = 0, n = testing::draw(rng, 0, 30); j < n; ++j) {
            inf.push_back(testing::draw(rng, 0, m_in - 1));
            ins.push_back(testing::draw(rng, 0, q_in - 1));
        }
        const GvtProblem p{ a, b, of, os, inf, ins };
        const auto v = testing::normal_vector(rng, inf.size());
        GvtStats stats;
        (void) gvt_matvec(p, v, GvtVariant::automatic, &stats);
        ++calls;
        std::uint64_t expected = 0;
        if (!of.empty() && !inf.empty()) {
            expected = std::min<std::uint64_t>(q_out * inf.size() + m_in * of.size(), m_out * inf.size() + q_in * of.size());
        }
        if (stats.last_ops != expected) {
            o.fail("op count " + std::to_string(stats.last_ops) + " != " + std::to_string(expected));
        }
    }
    for (const auto kernel : all_pairwise_kernels) {
        for (int trial = 0; trial < 20; ++trial) {
            const auto inst = testing::random_instance(kernel, rng);
            const auto spec = decompose(kernel);
            GvtStats stats;
            (void) pairwise_matvec(spec, inst.drug.kernel, inst.target_matrix(), inst.out, inst.in, inst.v, &stats);
            calls += stats.calls;
            if (stats.calls != spec.terms.size()) {
                o.fail("term call count");
            }
        }
    }

    // scaling at m = q = 50
    const std::size_t s = 50;
    const auto d = testing::random_feature_kernel(rng, s, 10).kernel;
    const auto t = testing::random_feature_kernel(rng, s, 10).kernel;
    const auto spec = decompose(PairwiseKernel::kronecker);
    std::vector<double> times;
    std::vector<std::uint64_t> explicit_bytes, ops;
    for (const std::size_t n : { 1000u, 2000u, 4000u }) {
        std::vector<index_type> first(n), second(n);
        for (std::size_t i = 0; i < n; ++i) {
            // the first s pairs cover every object on both sides
            first[i] = i < s ? i : testing::draw(rng, 0, s - 1);
            second[i] = i < s ? i : testing::draw(rng, 0, s - 1);
        }
        const PairSample sample(std::move(first), std::move(second));
        const PairwiseOperator op(spec, d, &t, sample, sample);
        const auto v = testing::normal_vector(rng, n);
        GvtStats stats;
        (void) op.apply(v, &stats);
        if (stats.last_ops != 2 * s * n) {
            o.fail("op count at n=" + std::to_string(n));
        }
        ops.push_back(stats.last_ops);
        std::vector<double> out(n);
        times.push_back(median_seconds([&] { op.apply(v, out); }, 41, static_cast<int>(40000 / n)));
        explicit_bytes.push_back(static_cast<std::uint64_t>(n) * n * sizeof(double));
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double ratio = times[i] / times[i - 1];
        if (ratio > 4.0) {
            o.fail("time ratio " + std::to_string(ratio) + " exceeds twice linear");
        }
        if (explicit_bytes[i] != 4 * explicit_bytes[i - 1]) {
            o.fail("explicit bytes ratio");
        }
    }
    o.detail << calls << " counted calls exact; matvec us at n=1k/2k/4k: " << times[0] * 1e6 << "/" << times[1] * 1e6 << "/" << times[2] * 1e6 << " (ratios " << times[1] / times[0] << ", "
             << times[2] / times[1] << "); explicit bytes " << explicit_bytes[0] << "/" << explicit_bytes[1] << "/" << explicit_bytes[2];
}

void decomposition_counts(Outcome &o) {
    const std::pair<PairwiseKernel, std::size_t> expected[] = {
        { PairwiseKernel::kronecker, 1 }, { PairwiseKernel::linear, 2 },        { PairwiseKernel::cartesian, 2 }, { PairwiseKernel::poly2d, 3 },
        { PairwiseKernel::symmetric, 2 }, { PairwiseKernel::anti_symmetric, 2 }, { PairwiseKernel::ranking, 4 },   { PairwiseKernel::mlpk, 10 },
    };
    for (const auto &[kernel, n] : expected) {
        const std::size_t got = decompose(kernel).terms.size();
        o.detail << to_string(kernel) << "=" << got << " ";
        if (got != n) {
            o.fail(std::string(to_string(kernel)) + " has " + std::to_string(got) + " terms");
        }
    }
}

void feature_maps_and_psd(Outcome &o) {
    testing::Rng rng(4004);
    double worst_map = 0.0, worst_eig = 0.0, worst_identity = 0.0;
    for (const auto kernel : all_pairwise_kernels) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto inst = testing::random_instance(kernel, rng, 4, 8);
            const DenseMatrix *xt = inst.target ? &inst.target->features : nullptr;
            for (std::size_t i = 0; i < inst.out.size(); ++i) {
                for (std::size_t j = 0; j < inst.in.size(); ++j) {
                    const Pair a = inst.out.pair(i), b = inst.in.pair(j);
                    const double phi = testing::dot(testing::feature_map(kernel, inst.drug.features, xt, a), testing::feature_map(kernel, inst.drug.features, xt, b));
                    const double k = kernel_value(kernel, inst.drug.kernel, inst.target_matrix(), a, b);
                    const double err = std::abs(k - phi) / std::max(1.0, std::abs(phi));
                    worst_map = std::max(worst_map, err);
                    if (!(err <= 1e-10)) {
                        o.fail(std::string(to_string(kernel)) + " feature map mismatch");
                    }
                }
            }
        }
        for (int trial = 0; trial < 30; ++trial) {
            const auto inst = testing::random_instance(kernel, rng, 6, 20);
            const double eig = testing::min_eigenvalue(build_explicit(kernel, inst.drug.kernel, inst.target_matrix(), inst.in, inst.in).matrix);
            worst_eig = std::min(worst_eig, eig);
            if (!(eig >= -1e-8)) {
                o.fail(std::string(to_string(kernel)) + " min eigenvalue " + std::to_string(eig));
            }
        }
    }
    for (int trial = 0; trial < 500; ++trial) {
        const auto d = testing::random_feature_kernel(rng, 5, 3).kernel;
        const auto t = testing::random_feature_kernel(rng, 4, 3).kernel;
        const Pair a{ testing::draw(rng, 0, 3), testing::draw(rng, 0, 3) };
        const Pair b{ testing::draw(rng, 0, 3), testing::draw(rng, 0, 3) };
        const double lin = kernel_value(PairwiseKernel::linear, d, &t, a, b);
        const double poly_err = std::abs(kernel_value(PairwiseKernel::poly2d, d, &t, a, b) - lin * lin) / std::max(1.0, lin * lin);
        const double rank = kernel_value(PairwiseKernel::ranking, d, nullptr, a, b);
        const double mlpk_err = std::abs(kernel_value(PairwiseKernel::mlpk, d, nullptr, a, b) - rank * rank) / std::max(1.0, rank * rank);
        worst_identity = std::max({ worst_identity, poly_err, mlpk_err });
        if (!(poly_err <= 1e-12 && mlpk_err <= 1e-12)) {
            o.fail("squared-kernel identity");
        }
    }
    o.detail << "worst feature-map error " << worst_map << ", lowest eigenvalue " << worst_eig << ", worst identity error " << worst_identity;
}

void solver_correctness(Outcome &o) {
    testing::Rng rng(5005);
    double worst = 0.0;
    std::size_t fits = 0;
    for (const auto kernel : all_pairwise_kernels) {
        const auto spec = decompose(kernel);
        for (int trial = 0; trial < 25; ++trial) {
            const auto inst = testing::random_instance(kernel, rng, 6, 20);
            const PairSample train = labeled(inst.in, inst.v);
            RidgeOptions opts;
            opts.lambda = 0.1;
            opts.rel_tol = 1e-12;
            opts.max_iter = 10 * train.size();
            const Model m = ridge_fit(train, spec, kernels_of(inst), opts);
            ++fits;
            const auto direct = testing::dense_ridge_solve(build_explicit(kernel, inst.drug.kernel, inst.target_matrix(), train, train).matrix, opts.lambda, inst.v);
            for (std::size_t i = 0; i < direct.size(); ++i) {
                const double err = std::abs(m.dual[i] - direct[i]);
                worst = std::max(worst, err);
                if (!(err <= 1e-6)) {
                    o.fail(std::string(to_string(kernel)) + " dual differs by " + std::to_string(err));
                }
            }
            for (std::size_t k = 1; k < m.residual_history.size(); ++k) {
                if (m.residual_history[k] > m.residual_history[k - 1] + 1e-12) {
                    o.fail("residual history increases");
                }
            }
        }
    }
    o.detail << fits << " fits, worst dual difference " << worst;
}

double mean_auc(SyntheticPattern pattern, PairwiseKernel kernel, double &std_out) {
    const Dataset ds = generate_synthetic(pattern, 20, 20, 6);
    CrossValidationOptions opts;
    opts.setting = Setting::s1;
    opts.lambda = 1e-5;
    opts.patience = 10;
    opts.seed = 6;
    const auto report = cross_validate(ds, decompose(kernel), BaseKernelConfig{}, opts);
    std_out = report.std_auc;
    return report.evaluated_folds > 0 ? report.mean_auc : 0.0;
}

void nonlinearity(Outcome &o) {
    const auto start = clock_type::now();
    double sd = 0.0;
    const double kron = mean_auc(SyntheticPattern::chessboard, PairwiseKernel::kronecker, sd);
    const double poly = mean_auc(SyntheticPattern::chessboard, PairwiseKernel::poly2d, sd);
    const double lin_chess = mean_auc(SyntheticPattern::chessboard, PairwiseKernel::linear, sd);
    const double lin_table = mean_auc(SyntheticPattern::tablecloth, PairwiseKernel::linear, sd);
    const double elapsed = seconds_since(start);
    if (!(kron >= 0.95)) {
        o.fail("kronecker chessboard AUC " + std::to_string(kron));
    }
    if (!(poly >= 0.95)) {
        o.fail("poly2d chessboard AUC " + std::to_string(poly));
    }
    if (!(lin_chess <= 0.6)) {
        o.fail("linear chessboard AUC " + std::to_string(lin_chess));
    }
    if (!(lin_table >= 0.95)) {
        o.fail("linear tablecloth AUC " + std::to_string(lin_table));
    }
    if (elapsed >= 60.0) {
        o.fail("runtime " + std::to_string(elapsed) + " s");
    }
    o.detail << "chessboard kronecker " << kron << ", poly2d " << poly << ", linear " << lin_chess << "; tablecloth linear " << lin_table << "; " << elapsed << " s";
}

void setting_ordering(Outcome &o) {
    LowRankOptions gen;
    gen.seed = 7;
    const Dataset ds = generate_low_rank(gen);
    double mean[5] = {}, sd[5] = {};
    for (int s = 1; s <= 4; ++s) {
        CrossValidationOptions opts;
        opts.setting = *setting_from_int(s);
        opts.seed = 7;
        const auto report = cross_validate(ds, decompose(PairwiseKernel::kronecker), BaseKernelConfig{}, opts);
        mean[s] = report.mean_auc;
        sd[s] = report.std_auc;
        o.detail << "S" << s << " " << mean[s] << "+-" << sd[s] << " (" << report.evaluated_folds << " folds); ";
    }
    const bool s1_ge_s2 = mean[1] + sd[1] >= mean[2];
    const bool s1_ge_s3 = mean[1] + sd[1] >= mean[3];
    const bool s2_s3_close = std::abs(mean[2] - mean[3]) <= sd[2] + sd[3];
    const bool s23_ge_s4 = std::min(mean[2], mean[3]) + std::max(sd[2], sd[3]) >= mean[4];
    o.detail << "ordering within fold std: S1>=S2 " << (s1_ge_s2 ? "yes" : "no") << ", S1>=S3 " << (s1_ge_s3 ? "yes" : "no") << ", S2~S3 " << (s2_s3_close ? "yes" : "no") << ", S2/S3>=S4 "
             << (s23_ge_s4 ? "yes" : "no") << " (report only)";
}

void split_invariants(Outcome &o) {
    testing::Rng rng(8008);
    std::size_t plans = 0, ignored = 0;
    for (const Setting setting : { Setting::s1, Setting::s2, Setting::s3, Setting::s4 }) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const PairSample s = testing::random_sample(rng, testing::draw(rng, 150, 400), testing::draw(rng, 9, 25), testing::draw(rng, 9, 25), false);
            const std::size_t fold = testing::draw(rng, 0, 8);
            SplitPlan plan = split_setting(s, setting, 9, fold, seed);
            for (const auto i : plan.ignored) {
                const bool d_out = std::binary_search(plan.held_out_first.begin(), plan.held_out_first.end(), s.first_ids()[i]);
                const bool t_out = std::binary_search(plan.held_out_second.begin(), plan.held_out_second.end(), s.second_ids()[i]);
                if (d_out == t_out) {
                    o.fail("ignored pair does not share exactly one side");
                }
            }
            ignored += plan.ignored.size();
            const InnerSplit inner = inner_split(s, plan.train, setting, 0.75, seed ^ 0x5bd1e995u);
            plan.train = inner.inner;
            plan.validation = inner.validation;
            plan.ignored.insert(plan.ignored.end(), inner.discarded.begin(), inner.discarded.end());
            const auto violations = check_split_plan(s, plan);
            ++plans;
            if (!violations.empty()) {
                o.fail("setting " + std::to_string(static_cast<int>(setting)) + " seed " + std::to_string(seed) + ": " + violations.front());
            }
        }
    }
    o.detail << plans << " plans checked, " << ignored << " setting-4 ignored pairs";
}

}  // namespace

int main() {
    struct Criterion {
        const char *name;
        void (*run)(Outcome &);
    };
    const Criterion criteria[] = {
        { "AC1 oracle equivalence", oracle_equivalence },   { "AC2 complexity contract", complexity_contract }, { "AC3 decomposition counts", decomposition_counts },
        { "AC4 feature maps and PSD", feature_maps_and_psd }, { "AC5 solver correctness", solver_correctness },   { "AC6 nonlinearity separation", nonlinearity },
        { "AC7 setting difficulty ordering", setting_ordering }, { "AC8 split invariants", split_invariants },
    };
    int failures = 0;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            c.run(o);
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " | " << o.detail.str() << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
