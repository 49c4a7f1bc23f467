#include "pairkern/cli/config.hpp"

#include "pairkern/cli/csv_io.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <string_view>

namespace pairkern::cli {

namespace {

constexpr std::array known_fields{
    "interactions", "drug_side", "target_side", "side_kind", "base_kernel", "gamma", "pairwise_kernel",
    "setting",      "folds",     "lambda",      "patience",  "max_iter",    "rel_tol", "seed", "output",
};

std::filesystem::path resolve(const std::filesystem::path &base_dir, const std::string &value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base_dir / p;
}

template <typename T>
T field(const nlohmann::json &doc, const char *name) {
    try {
        return doc.at(name).get<T>();
    } catch (const nlohmann::json::exception &) {
        throw ConfigError(std::string("config field '") + name + "' is missing or has the wrong type");
    }
}

template <typename T>
std::optional<T> optional_field(const nlohmann::json &doc, const char *name) {
    if (!doc.contains(name) || doc.at(name).is_null()) {
        return std::nullopt;
    }
    return field<T>(doc, name);
}

std::filesystem::path normalized(const std::filesystem::path &p) {
    std::error_code ec;
    auto canonical = std::filesystem::weakly_canonical(p, ec);
    return ec ? p.lexically_normal() : canonical;
}

}  // namespace

bool ExperimentConfig::shared_object_table() const {
    return target_side.empty() || normalized(target_side) == normalized(drug_side);
}

ExperimentConfig parse_config(const nlohmann::json &doc, const std::filesystem::path &base_dir) {
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto &[key, value] : doc.items()) {
        if (std::find(known_fields.begin(), known_fields.end(), std::string_view(key)) == known_fields.end()) {
            throw ConfigError("unknown config field '" + key + "'");
        }
    }

    ExperimentConfig cfg;
    cfg.interactions = resolve(base_dir, field<std::string>(doc, "interactions"));
    cfg.drug_side = resolve(base_dir, field<std::string>(doc, "drug_side"));
    if (const auto target = optional_field<std::string>(doc, "target_side")) {
        cfg.target_side = resolve(base_dir, *target);
    }

    const std::string side_kind = optional_field<std::string>(doc, "side_kind").value_or("features");
    if (side_kind == "features") {
        cfg.side_kind = SideKind::features;
    } else if (side_kind == "kernel") {
        cfg.side_kind = SideKind::kernel;
    } else {
        throw ConfigError("side_kind must be 'features' or 'kernel', got '" + side_kind + "'");
    }

    const std::string base = optional_field<std::string>(doc, "base_kernel").value_or("linear");
    const auto base_kind = parse_base_kernel(base);
    if (!base_kind) {
        throw ConfigError("unknown base_kernel '" + base + "'");
    }
    cfg.base_kernel.kind = *base_kind;
    const auto gamma = optional_field<double>(doc, "gamma");
    if (gamma.has_value() != (*base_kind == BaseKernelKind::gaussian)) {
        throw ConfigError("gamma must be given exactly when base_kernel is gaussian");
    }
    if (gamma) {
        if (!(*gamma > 0.0)) {
            throw ConfigError("gamma must be positive");
        }
        cfg.base_kernel.gamma = *gamma;
        cfg.has_gamma = true;
    }

    const std::string pairwise = field<std::string>(doc, "pairwise_kernel");
    const auto kernel = parse_pairwise_kernel(pairwise);
    if (!kernel) {
        throw ConfigError("unknown pairwise_kernel '" + pairwise + "'");
    }
    cfg.pairwise_kernel = *kernel;

    const auto setting = setting_from_int(optional_field<int>(doc, "setting").value_or(1));
    if (!setting) {
        throw ConfigError("setting must be 1, 2, 3 or 4");
    }
    cfg.setting = *setting;
    cfg.folds = optional_field<std::size_t>(doc, "folds").value_or(9);
    if (cfg.folds < 2) {
        throw ConfigError("folds must be at least 2");
    }
    cfg.lambda = optional_field<double>(doc, "lambda").value_or(1e-5);
    if (!(cfg.lambda >= 0.0)) {
        throw ConfigError("lambda must be non-negative");
    }
    cfg.patience = optional_field<std::size_t>(doc, "patience").value_or(10);
    if (cfg.patience == 0) {
        throw ConfigError("patience must be at least 1");
    }
    cfg.max_iter = optional_field<std::size_t>(doc, "max_iter");
    cfg.rel_tol = optional_field<double>(doc, "rel_tol").value_or(1e-8);
    cfg.seed = optional_field<std::uint64_t>(doc, "seed").value_or(0);
    if (const auto output = optional_field<std::string>(doc, "output")) {
        cfg.output = resolve(base_dir, *output);
    }

    if (requires_homogeneous(cfg.pairwise_kernel) && !cfg.shared_object_table()) {
        throw ConfigError("homogeneous kernel requires shared object table");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

nlohmann::json to_json(const ExperimentConfig &config) {
    nlohmann::json j;
    j["interactions"] = config.interactions.string();
    j["drug_side"] = config.drug_side.string();
    j["target_side"] = config.shared_object_table() ? nlohmann::json(nullptr) : nlohmann::json(config.target_side.string());
    j["side_kind"] = config.side_kind == SideKind::features ? "features" : "kernel";
    j["base_kernel"] = std::string(to_string(config.base_kernel.kind));
    j["gamma"] = config.has_gamma ? nlohmann::json(config.base_kernel.gamma) : nlohmann::json(nullptr);
    j["pairwise_kernel"] = std::string(to_string(config.pairwise_kernel));
    j["setting"] = static_cast<int>(config.setting);
    j["folds"] = config.folds;
    j["lambda"] = config.lambda;
    j["patience"] = config.patience;
    j["max_iter"] = config.max_iter ? nlohmann::json(*config.max_iter) : nlohmann::json(nullptr);
    j["rel_tol"] = config.rel_tol;
    j["seed"] = config.seed;
    j["output"] = config.output.empty() ? nlohmann::json(nullptr) : nlohmann::json(config.output.string());
    return j;
}

Dataset load_dataset(const ExperimentConfig &config) {
    auto read_side = [&](const std::filesystem::path &path) {
        return std::make_shared<const SideData>(config.side_kind == SideKind::kernel ? read_kernel_table(path) : read_feature_table(path));
    };
    const Interactions rows = read_interactions(config.interactions);
    const auto drug = read_side(config.drug_side);
    const auto target = config.shared_object_table() ? drug : read_side(config.target_side);
    Dataset ds = assemble_dataset(rows, drug, target);

    const ValidationReport report = validate_dataset(ds);
    if (!report.ok()) {
        std::string message = "invalid dataset:";
        for (const auto &v : report.violations) {
            message += " " + v + ";";
        }
        throw ConfigError(message);
    }
    return ds;
}

CrossValidationOptions cv_options(const ExperimentConfig &config) {
    CrossValidationOptions options;
    options.setting = config.setting;
    options.folds = config.folds;
    options.lambda = config.lambda;
    options.patience = config.patience;
    options.max_iter = config.max_iter;
    options.rel_tol = config.rel_tol;
    options.seed = config.seed;
    return options;
}

}  // namespace pairkern::cli
