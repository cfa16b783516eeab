#pragma once

#include <string>

#include "alphagan/trainers.hpp"

namespace alphagan {

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Binary layout (all integers little-endian):
//   magic "AGAN" | version u32 | config JSON length u32 + bytes |
//   repeated until EOF: name length u32 + UTF-8 name, tensor count u32,
//   per tensor: rank u32, dims u32 each, f64 values.
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// `config_json` is stored verbatim; it must carry algorithm, dataset kind,
/// data_dim and iterations so the loader can rebuild the network specs.
void save_checkpoint(const std::string& path, const TrainedModel& model,
                     const std::string& config_json);

struct LoadedCheckpoint {
    TrainedModel model;
    std::string config_json;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace alphagan
