#pragma once

#include <cstdint>
#include <string>

#include "synthlearn/model.hpp"

namespace synthlearn {

// Trainer state carried alongside the weights. rng_state is the serialized
// engine of the owning training loop; empty when not applicable.
struct CheckpointMeta {
  std::int64_t step = 0;
  std::uint64_t images_shown = 0;
  std::string rng_state;
};

struct LoadedCheckpoint {
  Model<float> model;
  CheckpointMeta meta;
};

// Text header (architecture, meta, named parameter index, blob checksum)
// followed by raw little-endian float32 parameters. Round trips bit-exactly.
void save_checkpoint(const std::string& path, const Model<float>& model,
                     const CheckpointMeta& meta);
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace synthlearn
