#pragma once

#include <string>

#include "mtdea/model.hpp"

namespace mtdea {

inline constexpr const char* kCheckpointHeader = "MTDEA-CKPT-1";

/// Single-file checkpoint: the version header line, a JSON manifest line
/// (config plus the named parameter list with shapes), then the flat
/// parameter arrays as little-endian 64-bit floats in manifest order.
/// Round trips are bit-exact.
void checkpoint_save(const ModelParams& params, const std::string& path);
ModelParams checkpoint_load(const std::string& path);

}  // namespace mtdea
