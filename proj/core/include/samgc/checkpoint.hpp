#pragma once

#include <string>
#include <utility>
#include <vector>

#include "samgc/tensor.hpp"

namespace samgc {

// On-disk model snapshot: magic + version, a config echo, a named tensor
// table, and a little-endian 64-bit float payload. Round trips are bitwise.
struct CheckpointData {
    std::string config_echo; // key=value lines
    std::vector<std::pair<std::string, Tensor>> tensors;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint_file(const CheckpointData& data, const std::string& path);

// Throws IoError with a distinct message for a corrupt header, a version
// mismatch, or a truncated payload.
CheckpointData load_checkpoint_file(const std::string& path);

} // namespace samgc
