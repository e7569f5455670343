#include "cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "cuenet/error.hpp"

namespace cuenet::cli {
namespace {

using nlohmann::ordered_json;

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

ordered_json records_json(const std::vector<FileRecord>& records) {
  ordered_json out = ordered_json::array();
  for (const auto& r : records) out.push_back({{"role", r.role}, {"path", r.path}, {"sha1", r.sha1}});
  return out;
}

std::vector<FileRecord> records_from(const ordered_json& j) {
  std::vector<FileRecord> out;
  for (const auto& r : j) {
    out.push_back({r.at("role").get<std::string>(), r.at("path").get<std::string>(),
                   r.at("sha1").get<std::string>()});
  }
  return out;
}

}  // namespace

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest.data(), &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  return git_blob_hash(read_all(path));
}

std::vector<FileRecord> hash_files(const std::string& role, const std::filesystem::path& path) {
  std::vector<FileRecord> out;
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({role, f.string(), git_blob_hash_file(f)});
  } else {
    out.push_back({role, path.string(), git_blob_hash_file(path)});
  }
  return out;
}

ordered_json Manifest::to_json() const {
  ordered_json j;
  j["tool"] = "cuenet";
  j["version"] = CUENET_VERSION;
  j["command"] = command;
  j["argv"] = argv;
  j["config"] = config;
  j["seed"] = seed;
  j["inputs"] = records_json(inputs);
  j["outputs"] = records_json(outputs);
  j["metrics"] = metrics;
  j["elapsed_seconds"] = elapsed_seconds;
  return j;
}

Manifest Manifest::from_json(const ordered_json& j) {
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config");
    m.seed = j.value("seed", std::uint64_t{0});
    m.inputs = records_from(j.at("inputs"));
    m.outputs = records_from(j.at("outputs"));
    m.metrics = j.at("metrics");
    m.elapsed_seconds = j.value("elapsed_seconds", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void Manifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest '" + path.string() + "'");
  out << to_json().dump(2) << '\n';
}

Manifest Manifest::load(const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_all(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("manifest '" + path.string() + "' is not JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace cuenet::cli
