#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace cuenet::cli {

/// SHA-1 over "blob <size>\0<content>", as `git hash-object` computes it.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

struct FileRecord {
  std::string role;
  std::string path;
  std::string sha1;
};

/// One record per regular file; directories expand to their files in
/// sorted order.
std::vector<FileRecord> hash_files(const std::string& role, const std::filesystem::path& path);

/// Everything needed to rerun a command and check its results.
///
///   {"tool": "cuenet", "version", "command", "argv": [...],
///    "config": {key: value, ...}, "seed",
///    "inputs":  [{"role", "path", "sha1"}, ...],
///    "outputs": [{"role", "path", "sha1"}, ...],
///    "metrics": {...}, "elapsed_seconds"}
///
/// Everything except elapsed_seconds is deterministic for a fixed argv,
/// config and input set.
struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  double elapsed_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
  static Manifest from_json(const nlohmann::ordered_json& j);
  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);
};

}  // namespace cuenet::cli
