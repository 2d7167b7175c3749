//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_IO_CHECKPOINT_H_
#define CARDIOGEN_IO_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cardiogen::io {

// File layout, all integers little-endian:
//   "CGAI" | u32 version | u64 metadata length | metadata JSON
//   u64 tensor count, then per tensor:
//   u32 name length | name | u32 dtype | u32 rank | u64 dims[rank]
//   u64 payload bytes | payload
inline constexpr std::string_view kCheckpointMagic = "CGAI";
inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::uint32_t kDtypeFloat32 = 1;

struct TensorEntry {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major
};

struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<TensorEntry> tensors;

  /// nullptr when absent.
  const TensorEntry *find(std::string_view name) const;
};

std::string serialize_checkpoint(const Checkpoint &ckpt);
/// Throws CorruptCheckpoint on a bad magic, truncation, inconsistent
/// lengths or trailing bytes; VersionMismatch when the version differs.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path);
/// Throws FileNotFound, then as deserialize_checkpoint.
Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace cardiogen::io

#endif  // CARDIOGEN_IO_CHECKPOINT_H_
