#include "pairkern/cli/commands.hpp"

#include "pairkern/cli/csv_io.hpp"
#include "pairkern/explicit_kernel.hpp"
#include "pairkern/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>

namespace pairkern::cli {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - start).count();
}

nlohmann::json error_record(const std::string &message) {
    return { { "type", "error" }, { "message", message } };
}

}  // namespace

void generate_files(const GenerateOptions &options) {
    const Dataset ds = generate_synthetic(options.pattern, options.drugs, options.targets, options.seed);
    std::filesystem::create_directories(options.out_dir);
    write_interactions(options.out_dir / "interactions.csv", ds);
    write_feature_table(options.out_dir / "drugs.csv", *ds.drug_side);
    write_feature_table(options.out_dir / "targets.csv", *ds.target_side);

    const nlohmann::json config = {
        { "interactions", "interactions.csv" },
        { "drug_side", "drugs.csv" },
        { "target_side", "targets.csv" },
        { "side_kind", "features" },
        { "base_kernel", "linear" },
        { "pairwise_kernel", "kronecker" },
        { "setting", 1 },
        { "folds", 9 },
        { "lambda", 1e-5 },
        { "patience", 10 },
        { "rel_tol", 1e-8 },
        { "seed", options.seed },
        { "output", "results.jsonl" },
    };
    std::ofstream out(options.out_dir / "config.json");
    out << config.dump(2) << '\n';
    if (!out) {
        throw std::runtime_error("cannot write " + (options.out_dir / "config.json").string());
    }
}

void run_experiment(const ExperimentConfig &config, std::size_t jobs, std::ostream &results) {
    const Dataset ds = load_dataset(config);
    const PairwiseKernelSpec spec = decompose(config.pairwise_kernel);
    const BaseKernels kernels = compute_base_kernels(ds, config.base_kernel);
    CrossValidationOptions options = cv_options(config);
    options.jobs = jobs;

    nlohmann::json head = { { "type", "config" }, { "config", to_json(config) } };
    head["pairs"] = ds.pairs.size();
    head["drugs"] = ds.drug_count;
    head["targets"] = ds.target_count;
    head["homogeneous"] = ds.homogeneous();
    head["terms"] = spec.terms.size();
    results << head.dump() << '\n';

    const auto start = clock_type::now();
    const CrossValidationReport report = cross_validate(ds.pairs, spec, kernels, options);
    const double total_ms = ms_since(start);

    for (const FoldRecord &f : report.folds) {
        nlohmann::json rec = {
            { "type", "fold" },
            { "fold", f.fold },
            { "auc", f.auc ? nlohmann::json(*f.auc) : nlohmann::json(nullptr) },
            { "iterations", f.iterations },
            { "validation_auc", f.validation_auc },
            { "train_size", f.train_size },
            { "test_size", f.test_size },
            { "ignored_size", f.ignored_size },
            { "train_ms", f.train_ms },
            { "gvt_ops", f.gvt_ops },
        };
        if (!f.error.empty()) {
            rec["error"] = f.error;
        }
        results << rec.dump() << '\n';
    }
    const nlohmann::json aggregate = {
        { "type", "aggregate" },
        { "folds", report.folds.size() },
        { "evaluated_folds", report.evaluated_folds },
        { "mean_auc", report.evaluated_folds > 0 ? nlohmann::json(report.mean_auc) : nlohmann::json(nullptr) },
        { "std_auc", report.evaluated_folds > 0 ? nlohmann::json(report.std_auc) : nlohmann::json(nullptr) },
        { "total_ms", total_ms },
    };
    results << aggregate.dump() << '\n';
}

std::uint64_t memory_budget_from_env(std::uint64_t fallback) {
    const char *value = std::getenv("PAIRKERN_EXPLICIT_BUDGET_BYTES");
    if (value == nullptr || *value == '\0') {
        return fallback;
    }
    char *end = nullptr;
    const unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end == value || *end != '\0') {
        throw std::invalid_argument(std::string("PAIRKERN_EXPLICIT_BUDGET_BYTES is not an integer: ") + value);
    }
    return parsed;
}

namespace {

template <typename Apply>
double median_ms(std::size_t repeats, Apply &&apply) {
    std::vector<double> times;
    for (std::size_t r = 0; r < std::max<std::size_t>(repeats, 1); ++r) {
        const auto start = clock_type::now();
        apply();
        times.push_back(ms_since(start));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const ExperimentConfig &config, const Dataset &ds, const BenchmarkOptions &options) {
    const PairwiseKernelSpec spec = decompose(config.pairwise_kernel);
    const BaseKernels kernels = compute_base_kernels(ds, config.base_kernel);

    std::vector<std::size_t> order(ds.pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const bool run_gvt = options.backend != BenchmarkBackend::explicit_matrix;
    const bool run_explicit = options.backend != BenchmarkBackend::gvt;

    std::vector<BenchmarkRow> rows;
    for (const std::size_t n : options.sizes) {
        BenchmarkRow base;
        base.n = n;
        if (n > ds.pairs.size()) {
            base.backend = "any";
            base.status = "skipped";
            base.reason = "size exceeds the " + std::to_string(ds.pairs.size()) + " available pairs";
            rows.push_back(base);
            continue;
        }
        const std::vector<std::size_t> picked(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
        const PairSample sample = ds.pairs.subset(picked);
        base.m = relabel_compact(sample.first_ids()).unique_count();
        base.q = relabel_compact(sample.second_ids()).unique_count();

        std::vector<double> probe(n);
        std::normal_distribution<double> normal;
        for (double &x : probe) {
            x = normal(rng);
        }
        RidgeOptions ridge;
        ridge.lambda = config.lambda;
        ridge.max_iter = options.iterations;
        ridge.rel_tol = config.rel_tol;

        std::optional<std::vector<double>> gvt_dual;
        if (run_gvt) {
            BenchmarkRow row = base;
            row.backend = "gvt";
            row.status = "ok";
            const PairwiseOperator op(spec, *kernels.drug, kernels.target.get(), sample, sample);
            GvtStats one;
            (void) op.apply(probe, &one);
            row.matvec_ops = one.total_ops;
            row.matvec_ms = median_ms(options.matvec_repeats, [&] { (void) op.apply(probe); });
            const std::uint64_t bytes_m = static_cast<std::uint64_t>(base.m) * base.m * sizeof(double);
            const std::uint64_t bytes_q = static_cast<std::uint64_t>(base.q) * base.q * sizeof(double);
            if (ds.homogeneous()) {
                // one shared table covering both positions
                std::vector<index_type> all(sample.first_ids().begin(), sample.first_ids().end());
                all.insert(all.end(), sample.second_ids().begin(), sample.second_ids().end());
                const std::uint64_t objects = relabel_compact(all).unique_count();
                row.peak_kernel_bytes = objects * objects * sizeof(double);
            } else {
                row.peak_kernel_bytes = bytes_m + bytes_q;
            }
            GvtStats fit_stats;
            const auto start = clock_type::now();
            const Model model = ridge_fit(sample, spec, kernels, ridge, &fit_stats);
            row.fit_ms = ms_since(start);
            row.gvt_ops = fit_stats.total_ops;
            row.iterations = model.iterations_used;
            gvt_dual = model.dual;
            rows.push_back(row);
        }
        if (run_explicit) {
            BenchmarkRow row = base;
            row.backend = "explicit";
            row.peak_kernel_bytes = static_cast<std::uint64_t>(n) * n * sizeof(double);
            row.matvec_ops = static_cast<std::uint64_t>(n) * n;
            if (row.peak_kernel_bytes > options.memory_budget_bytes) {
                row.status = "skipped";
                row.reason = "explicit kernel needs " + std::to_string(row.peak_kernel_bytes) + " bytes, budget " + std::to_string(options.memory_budget_bytes);
                rows.push_back(row);
                continue;
            }
            row.status = "ok";
            const auto start = clock_type::now();
            RidgeOptions explicit_ridge = ridge;
            explicit_ridge.backend = MatvecBackend::explicit_matrix;
            const Model model = ridge_fit(sample, spec, kernels, explicit_ridge);
            row.fit_ms = ms_since(start);
            row.iterations = model.iterations_used;

            const ExplicitKernelMatrix k = build_explicit(spec.name, *kernels.drug, kernels.target.get(), sample, sample);
            row.matvec_ms = median_ms(options.matvec_repeats, [&] { (void) explicit_matvec(k, probe); });
            if (gvt_dual) {
                double scale = 0.0;
                double diff = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    scale = std::max(scale, std::abs((*gvt_dual)[i]));
                    diff = std::max(diff, std::abs((*gvt_dual)[i] - model.dual[i]));
                }
                row.dual_max_rel_diff = scale > 0.0 ? diff / scale : diff;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

void write_benchmark_csv(std::ostream &out, const std::vector<BenchmarkRow> &rows) {
    out << "n,m,q,backend,status,matvec_ms,fit_ms,peak_kernel_bytes,matvec_ops,gvt_ops,iterations,dual_max_rel_diff,reason\n";
    for (const BenchmarkRow &r : rows) {
        out << r.n << ',' << r.m << ',' << r.q << ',' << r.backend << ',' << r.status << ',' << format_number(r.matvec_ms) << ',' << format_number(r.fit_ms) << ','
            << r.peak_kernel_bytes << ',' << r.matvec_ops << ',' << r.gvt_ops << ',' << r.iterations << ',' << (r.dual_max_rel_diff ? format_number(*r.dual_max_rel_diff) : "") << ','
            << r.reason << '\n';
    }
}

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{ "Pairwise kernel ridge regression with the generalized vec trick" };
    app.name("pairkern");
    app.require_subcommand(1);

    GenerateOptions gen;
    std::string pattern = "chessboard";
    std::string out_dir;
    auto *generate = app.add_subcommand("generate", "Write a synthetic chessboard/tablecloth dataset");
    generate->add_option("--pattern", pattern, "chessboard or tablecloth")->check(CLI::IsMember({ "chessboard", "tablecloth" }));
    generate->add_option("--drugs", gen.drugs, "Number of drugs (>= 2)")->required();
    generate->add_option("--targets", gen.targets, "Number of targets (>= 2)")->required();
    generate->add_option("--seed", gen.seed, "Seed for the pair order");
    generate->add_option("--out", out_dir, "Output directory")->required();

    std::string config_path;
    std::string results_path;
    std::size_t jobs = 1;
    auto *run = app.add_subcommand("run", "Cross-validate a pairwise kernel model");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", results_path, "Results file; overrides the config's output");
    run->add_option("--jobs", jobs, "Folds evaluated in parallel")->check(CLI::PositiveNumber);

    std::string bench_config;
    std::vector<std::size_t> sizes;
    std::string backend = "both";
    std::string bench_out;
    BenchmarkOptions bench;
    auto *benchmark = app.add_subcommand("benchmark", "Time GVT against the explicit kernel matrix");
    benchmark->add_option("--config", bench_config, "Experiment config (JSON)")->required();
    benchmark->add_option("--sizes", sizes, "Ascending pair counts, comma separated")->required()->delimiter(',');
    benchmark->add_option("--backend", backend, "gvt, explicit or both")->check(CLI::IsMember({ "gvt", "explicit", "both" }));
    benchmark->add_option("--iterations", bench.iterations, "MINRES iterations per fit");
    benchmark->add_option("--out", bench_out, "CSV output file (default stdout)");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("pairkern");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (std::string &a : argv_storage) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    try {
        if (*generate) {
            if (gen.drugs < 2 || gen.targets < 2) {
                err << "usage error: --drugs and --targets must be at least 2\n";
                return 1;
            }
            gen.pattern = *parse_pattern(pattern);
            gen.out_dir = out_dir;
            generate_files(gen);
            out << "wrote " << gen.drugs * gen.targets << " pairs to " << gen.out_dir.string() << '\n';
            return 0;
        }
        if (*run) {
            const ExperimentConfig config = load_config(config_path);
            if (config.setting != Setting::s1 && config.pairwise_kernel == PairwiseKernel::cartesian) {
                err << "warning: the cartesian kernel cannot generalize to objects unseen in training\n";
            }
            const std::filesystem::path target = results_path.empty() ? config.output : std::filesystem::path(results_path);
            if (target.empty()) {
                run_experiment(config, jobs, out);
            } else {
                std::ofstream file(target, std::ios::binary);
                if (!file) {
                    throw std::runtime_error("cannot write " + target.string());
                }
                run_experiment(config, jobs, file);
            }
            return 0;
        }
        if (*benchmark) {
            if (!std::is_sorted(sizes.begin(), sizes.end()) || std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
                err << error_record("--sizes must be strictly ascending").dump() << '\n';
                return 1;
            }
            const ExperimentConfig config = load_config(bench_config);
            const Dataset ds = load_dataset(config);
            bench.sizes = sizes;
            bench.backend = backend == "gvt" ? BenchmarkBackend::gvt : backend == "explicit" ? BenchmarkBackend::explicit_matrix : BenchmarkBackend::both;
            bench.memory_budget_bytes = memory_budget_from_env(bench.memory_budget_bytes);
            const std::vector<BenchmarkRow> rows = run_benchmark(config, ds, bench);
            if (bench_out.empty()) {
                write_benchmark_csv(out, rows);
            } else {
                std::ofstream file(bench_out, std::ios::binary);
                if (!file) {
                    throw std::runtime_error("cannot write " + bench_out);
                }
                write_benchmark_csv(file, rows);
            }
            if (bench.backend != BenchmarkBackend::gvt) {
                const bool any_explicit = std::any_of(rows.begin(), rows.end(), [](const BenchmarkRow &r) { return r.backend == "explicit" && r.status == "ok"; });
                if (!any_explicit) {
                    err << error_record("explicit backend exceeded the memory budget at every size").dump() << '\n';
                    return 1;
                }
            }
            return 0;
        }
    } catch (const std::exception &e) {
        err << error_record(e.what()).dump() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace pairkern::cli
