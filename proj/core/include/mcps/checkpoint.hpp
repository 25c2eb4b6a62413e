#pragma once

// Binary checkpoint, little-endian throughout:
//   "MCPS1" | u32 version | u32 N | u32 lmax | f64 t | u64 step | u64 config hash
//   | phi: N blocks of (lmax+1)^2 f64 in (l, m) order | u: (lmax+1)^2 f64

#include <cstdint>
#include <string>

#include "mcps/dynamics.hpp"

namespace mcps {

constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  SimState state;
  std::uint64_t config_hash = 0;
};

/// Writes to a temporary file and renames it into place. Throws IoError.
void save_checkpoint(const std::string& path, const SimState& state, std::uint64_t config_hash);
/// Throws IoError on unreadable, truncated or foreign files.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mcps
