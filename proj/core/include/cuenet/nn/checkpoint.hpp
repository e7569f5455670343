#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cuenet/nn/param_store.hpp"

namespace cuenet::nn {

// Checkpoint container, all integers little-endian:
//
//   offset  bytes  field
//   0       8      magic "CUENETCK"
//   8       4      format version (u32) = 1
//   12      4      reserved (u32) = 0
//   16      8      manifest length M (u64)
//   24      M      manifest: UTF-8 JSON
//                    {"entries": [{"name", "shape", "dtype": "f32",
//                                  "offset", "trainable"}, ...],
//                     "metadata": {...}}
//   24+M    ...    payload: each entry's values as IEEE-754 binary32,
//                  row-major, at its "offset" (bytes from payload start)
//
// Entries are written in store order with contiguous offsets and the file
// ends exactly at the last entry. The manifest is serialized with sorted
// keys and no whitespace, so identical stores give identical bytes.

inline constexpr std::string_view kCheckpointMagic = "CUENETCK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::string dtype = "f32";
  std::uint64_t offset = 0;
  bool trainable = true;
};

struct Checkpoint {
  /// Serialized JSON object.
  std::string metadata_json = "{}";
  std::vector<CheckpointEntry> entries;
  /// Values widened back to double.
  ParamStore store;
};

void write_checkpoint(std::ostream& out, const ParamStore& store,
                      std::string_view metadata_json = "{}");
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     std::string_view metadata_json = "{}");

/// Called with the parsed manifest (empty store) before the payload is read.
using ManifestCheck = std::function<void(const Checkpoint&)>;

/// Throws CorruptCheckpoint on a bad header, unparsable manifest,
/// inconsistent offsets or a payload of the wrong length.
Checkpoint read_checkpoint(std::istream& in, const ManifestCheck& check = {});
Checkpoint load_checkpoint(const std::filesystem::path& path, const ManifestCheck& check = {});

/// Manifest only; the payload is not read.
Checkpoint read_checkpoint_manifest(std::istream& in);

/// Copies entries named `prefix + name` of `target` from the checkpoint.
/// Throws ShapeManifestMismatch when an entry is missing, has a different
/// shape, or the checkpoint holds extra entries under the prefix.
void restore_into(ParamStore& target, const Checkpoint& ckpt, std::string_view prefix = "");

}  // namespace cuenet::nn
