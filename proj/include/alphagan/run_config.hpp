#pragma once

#include <optional>
#include <string>

#include "alphagan/datasets.hpp"
#include "alphagan/trainers.hpp"

namespace alphagan {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dataset description as it appears in config files and checkpoints.
struct DatasetSpec {
    std::string kind = "ring";  // ring | grid | shapes | idx
    std::size_t n_modes = 8;
    double radius = 2.0;
    double sigma = 0.02;
    std::size_t side = 5;  // grid
    double spacing = 2.0;
    std::size_t n_per_split = 8192;
    std::uint64_t seed = 0;
    std::size_t n_classes = 4;  // shapes
    std::size_t image_side = 16;
    std::string images_path, labels_path;  // idx

    Dataset build() const;
};

struct RunConfig {
    TrainingConfig training;
    DatasetSpec dataset;
    bool seed_in_file = false;
};

/// Strict parse: unknown keys are rejected at every level, limits from the
/// training-config invariants are enforced (positive rates, ratios >= 1,
/// batch >= 2), and messages name the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Serializes a config the way checkpoints store it, including the runtime
/// `iterations` and `data_dim` fields.
std::string run_config_to_json(const RunConfig& config, std::uint64_t iterations,
                               std::size_t data_dim);

/// Parses the JSON found in a checkpoint (same schema plus the runtime keys).
RunConfig parse_checkpoint_config(const std::string& json_text);

}  // namespace alphagan
