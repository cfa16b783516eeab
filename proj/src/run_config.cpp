#include "alphagan/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace alphagan {

using nlohmann::json;

Dataset DatasetSpec::build() const {
    if (kind == "ring") return ring_of_gaussians(n_modes, radius, sigma, n_per_split, seed);
    if (kind == "grid") return grid_of_gaussians(side, spacing, sigma, n_per_split, seed);
    if (kind == "shapes") return procedural_shapes(n_classes, image_side, n_per_split, seed);
    if (kind == "idx") return idx_load(images_path, labels_path, seed);
    throw ConfigError("dataset.kind must be one of ring, grid, shapes, idx (got \"" + kind + "\")");
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& scope) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) {
            throw ConfigError("unknown key \"" + (scope.empty() ? key : scope + "." + key) + "\"");
        }
    }
}

double require_positive(const json& obj, const std::string& key, double fallback,
                        const std::string& scope) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(scope + key + " must be a number");
    const double v = obj[key].get<double>();
    if (!(v > 0.0)) throw ConfigError(scope + key + " must be > 0");
    return v;
}

double require_nonnegative(const json& obj, const std::string& key, double fallback,
                           const std::string& scope) {
    if (!obj.contains(key)) return fallback;
    const double v = obj[key].get<double>();
    if (!(v >= 0.0)) throw ConfigError(scope + key + " must be >= 0");
    return v;
}

std::size_t require_count(const json& obj, const std::string& key, std::size_t fallback,
                          std::size_t minimum, const std::string& scope) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned()) {
        throw ConfigError(scope + key + " must be a non-negative integer");
    }
    const std::size_t v = obj[key].get<std::size_t>();
    if (v < minimum) {
        throw ConfigError(scope + key + " must be >= " + std::to_string(minimum));
    }
    return v;
}

DatasetSpec parse_dataset(const json& obj) {
    reject_unknown_keys(obj,
                        {"kind", "n_modes", "radius", "sigma", "side", "spacing", "n_per_split",
                         "seed", "n_classes", "image_side", "images_path", "labels_path"},
                        "dataset");
    if (!obj.contains("kind")) throw ConfigError("missing required key \"dataset.kind\"");
    DatasetSpec ds;
    ds.kind = obj["kind"].get<std::string>();
    if (ds.kind != "ring" && ds.kind != "grid" && ds.kind != "shapes" && ds.kind != "idx") {
        throw ConfigError("dataset.kind must be one of ring, grid, shapes, idx (got \"" + ds.kind +
                          "\")");
    }
    ds.n_modes = require_count(obj, "n_modes", ds.n_modes, 2, "dataset.");
    ds.radius = require_positive(obj, "radius", ds.radius, "dataset.");
    ds.sigma = require_positive(obj, "sigma", ds.sigma, "dataset.");
    ds.side = require_count(obj, "side", ds.side, 1, "dataset.");
    ds.spacing = require_positive(obj, "spacing", ds.spacing, "dataset.");
    ds.n_per_split = require_count(obj, "n_per_split", ds.n_per_split, 2, "dataset.");
    ds.seed = require_count(obj, "seed", ds.seed, 0, "dataset.");
    ds.n_classes = require_count(obj, "n_classes", ds.n_classes, 2, "dataset.");
    ds.image_side = require_count(obj, "image_side", ds.image_side, 8, "dataset.");
    if (obj.contains("images_path")) ds.images_path = obj["images_path"].get<std::string>();
    if (obj.contains("labels_path")) ds.labels_path = obj["labels_path"].get<std::string>();
    if (ds.kind == "idx" && ds.images_path.empty()) {
        throw ConfigError("dataset.images_path is required for kind \"idx\"");
    }
    return ds;
}

std::vector<std::size_t> parse_sizes(const json& obj, const std::string& key,
                                     std::vector<std::size_t> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array() || obj[key].empty()) {
        throw ConfigError(key + " must be a non-empty array of layer sizes");
    }
    std::vector<std::size_t> sizes;
    for (const auto& v : obj[key]) {
        if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
            throw ConfigError(key + " entries must be positive integers");
        }
        sizes.push_back(v.get<std::size_t>());
    }
    return sizes;
}

RunConfig parse_impl(const std::string& json_text, bool allow_runtime_keys) {
    json obj = json::parse(json_text, nullptr, false);
    if (obj.is_discarded()) throw ConfigError("config is not valid JSON");
    if (!obj.is_object()) throw ConfigError("config must be a JSON object");

    std::set<std::string> allowed = {
        "algorithm",     "dataset",       "seed",         "batch_size",
        "latent_dim",    "noise_dim",     "max_iter",     "eval_every",
        "lambda",        "gp_coeff",      "real_weight",  "learning_rates",
        "generator_steps", "discriminator_steps", "age_weights", "hidden",
        "code_disc_hidden", "generator_variant", "shared_batch",
        "init_scale",    "adam_beta1",    "adam_beta2"};
    if (allow_runtime_keys) {
        allowed.insert("iterations");
        allowed.insert("data_dim");
    }
    reject_unknown_keys(obj, allowed, "");

    if (!obj.contains("algorithm")) throw ConfigError("missing required key \"algorithm\"");
    if (!obj.contains("dataset")) throw ConfigError("missing required key \"dataset\"");

    RunConfig rc;
    rc.training = TrainingConfig::defaults_for(algorithm_from_name(obj["algorithm"].get<std::string>()));
    rc.dataset = parse_dataset(obj["dataset"]);
    rc.training.dataset_id = rc.dataset.kind;

    TrainingConfig& t = rc.training;
    if (obj.contains("seed")) {
        t.seed = require_count(obj, "seed", 0, 0, "");
        rc.seed_in_file = true;
    }
    t.batch_size = require_count(obj, "batch_size", t.batch_size, 2, "");
    t.latent_dim = require_count(obj, "latent_dim", t.latent_dim, 1, "");
    t.noise_dim = require_count(obj, "noise_dim", t.noise_dim, 0, "");
    t.max_iter = require_count(obj, "max_iter", t.max_iter, 0, "");
    t.eval_every = require_count(obj, "eval_every", t.eval_every, 1, "");
    t.lambda = require_positive(obj, "lambda", t.lambda, "");
    t.gp_coeff = require_nonnegative(obj, "gp_coeff", t.gp_coeff, "");
    t.real_weight = require_positive(obj, "real_weight", t.real_weight, "");
    t.generator_steps = require_count(obj, "generator_steps", t.generator_steps, 1, "");
    t.discriminator_steps = require_count(obj, "discriminator_steps", t.discriminator_steps, 1, "");
    if (obj.contains("learning_rates")) {
        const json& lr = obj["learning_rates"];
        reject_unknown_keys(lr, {"generator", "encoder", "discriminator", "code_discriminator"},
                            "learning_rates");
        t.learning_rates.generator =
            require_positive(lr, "generator", t.learning_rates.generator, "learning_rates.");
        t.learning_rates.encoder = require_positive(
            lr, "encoder", lr.contains("generator") ? t.learning_rates.generator
                                                    : t.learning_rates.encoder,
            "learning_rates.");
        t.learning_rates.discriminator =
            require_positive(lr, "discriminator", t.learning_rates.discriminator, "learning_rates.");
        t.learning_rates.code_discriminator = require_positive(
            lr, "code_discriminator", t.learning_rates.code_discriminator, "learning_rates.");
    }
    if (obj.contains("age_weights")) {
        const json& w = obj["age_weights"];
        reject_unknown_keys(w, {"data_reconstruction", "code_reconstruction"}, "age_weights");
        t.age_weights.data_reconstruction = require_positive(
            w, "data_reconstruction", t.age_weights.data_reconstruction, "age_weights.");
        t.age_weights.code_reconstruction = require_positive(
            w, "code_reconstruction", t.age_weights.code_reconstruction, "age_weights.");
    }
    t.init_scale = require_positive(obj, "init_scale", t.init_scale, "");
    t.adam_beta1 = require_nonnegative(obj, "adam_beta1", t.adam_beta1, "");
    t.adam_beta2 = require_nonnegative(obj, "adam_beta2", t.adam_beta2, "");
    t.hidden = parse_sizes(obj, "hidden", t.hidden);
    t.code_disc_hidden = parse_sizes(obj, "code_disc_hidden", t.code_disc_hidden);
    if (obj.contains("generator_variant")) {
        const std::string v = obj["generator_variant"].get<std::string>();
        if (v == "saturating") t.gan_generator_variant = GeneratorVariant::saturating;
        else if (v == "alternative") t.gan_generator_variant = GeneratorVariant::alternative;
        else if (v == "reverse_kl") t.gan_generator_variant = GeneratorVariant::reverse_kl;
        else throw ConfigError("generator_variant must be saturating, alternative or reverse_kl");
    }
    if (obj.contains("shared_batch")) {
        if (!obj["shared_batch"].is_boolean()) throw ConfigError("shared_batch must be a boolean");
        t.shared_batch = obj["shared_batch"].get<bool>();
    }
    t.validate();
    return rc;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) { return parse_impl(json_text, false); }

RunConfig parse_checkpoint_config(const std::string& json_text) {
    return parse_impl(json_text, true);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string run_config_to_json(const RunConfig& config, std::uint64_t iterations,
                               std::size_t data_dim) {
    const TrainingConfig& t = config.training;
    json obj;
    obj["algorithm"] = algorithm_name(t.algorithm);
    json ds;
    ds["kind"] = config.dataset.kind;
    if (config.dataset.kind == "ring") {
        ds["n_modes"] = config.dataset.n_modes;
        ds["radius"] = config.dataset.radius;
        ds["sigma"] = config.dataset.sigma;
        ds["n_per_split"] = config.dataset.n_per_split;
    } else if (config.dataset.kind == "grid") {
        ds["side"] = config.dataset.side;
        ds["spacing"] = config.dataset.spacing;
        ds["sigma"] = config.dataset.sigma;
        ds["n_per_split"] = config.dataset.n_per_split;
    } else if (config.dataset.kind == "shapes") {
        ds["n_classes"] = config.dataset.n_classes;
        ds["image_side"] = config.dataset.image_side;
        ds["n_per_split"] = config.dataset.n_per_split;
    } else {
        ds["images_path"] = config.dataset.images_path;
        if (!config.dataset.labels_path.empty()) ds["labels_path"] = config.dataset.labels_path;
    }
    ds["seed"] = config.dataset.seed;
    obj["dataset"] = ds;
    obj["seed"] = t.seed;
    obj["batch_size"] = t.batch_size;
    obj["latent_dim"] = t.latent_dim;
    obj["noise_dim"] = t.noise_dim;
    obj["max_iter"] = t.max_iter;
    obj["eval_every"] = t.eval_every;
    obj["lambda"] = t.lambda;
    obj["gp_coeff"] = t.gp_coeff;
    obj["real_weight"] = t.real_weight;
    obj["learning_rates"] = {{"generator", t.learning_rates.generator},
                             {"encoder", t.learning_rates.encoder},
                             {"discriminator", t.learning_rates.discriminator},
                             {"code_discriminator", t.learning_rates.code_discriminator}};
    obj["generator_steps"] = t.generator_steps;
    obj["discriminator_steps"] = t.discriminator_steps;
    obj["age_weights"] = {{"data_reconstruction", t.age_weights.data_reconstruction},
                          {"code_reconstruction", t.age_weights.code_reconstruction}};
    obj["init_scale"] = t.init_scale;
    obj["adam_beta1"] = t.adam_beta1;
    obj["adam_beta2"] = t.adam_beta2;
    obj["hidden"] = t.hidden;
    obj["code_disc_hidden"] = t.code_disc_hidden;
    switch (t.gan_generator_variant) {
        case GeneratorVariant::saturating: obj["generator_variant"] = "saturating"; break;
        case GeneratorVariant::alternative: obj["generator_variant"] = "alternative"; break;
        case GeneratorVariant::reverse_kl: obj["generator_variant"] = "reverse_kl"; break;
    }
    obj["shared_batch"] = t.shared_batch;
    obj["iterations"] = iterations;
    obj["data_dim"] = data_dim;
    return obj.dump();
}

}  // namespace alphagan
