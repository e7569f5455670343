#include "cuenet/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cuenet/error.hpp"
#include "json.hpp"

namespace cuenet::nn {
namespace {

using nlohmann::json;

constexpr std::size_t kHeaderBytes = 24;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string read_exact(std::istream& in, std::size_t n, const char* what) {
  std::string buf(n, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw CorruptCheckpoint(std::string("truncated ") + what);
  }
  return buf;
}

std::string manifest_json(const ParamStore& store, std::string_view metadata_json) {
  json metadata;
  try {
    metadata = json::parse(metadata_json);
  } catch (const json::parse_error&) {
    throw UsageError("checkpoint metadata is not valid JSON");
  }
  json entries = json::array();
  std::uint64_t offset = 0;
  for (const auto& p : store.entries()) {
    entries.push_back({{"name", p.name},
                       {"shape", p.value.shape()},
                       {"dtype", "f32"},
                       {"offset", offset},
                       {"trainable", p.trainable}});
    offset += 4 * p.value.size();
  }
  json manifest = {{"entries", std::move(entries)}, {"metadata", std::move(metadata)}};
  return manifest.dump(-1, ' ', false, json::error_handler_t::replace);
}

struct Header {
  std::uint64_t manifest_bytes = 0;
};

Header read_header(std::istream& in) {
  const std::string raw = read_exact(in, kHeaderBytes, "header");
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.compare(0, kCheckpointMagic.size(), kCheckpointMagic) != 0) {
    throw CorruptCheckpoint("bad magic");
  }
  const auto version = static_cast<std::uint32_t>(get_le(p + 8, 4));
  if (version != kCheckpointVersion) {
    throw CorruptCheckpoint("unsupported version " + std::to_string(version));
  }
  const std::uint64_t manifest_bytes = get_le(p + 16, 8);
  if (manifest_bytes > (std::uint64_t{1} << 30)) throw CorruptCheckpoint("manifest too large");
  return Header{manifest_bytes};
}

Checkpoint parse_manifest(const std::string& text) {
  Checkpoint ckpt;
  try {
    const json manifest = json::parse(text);
    ckpt.metadata_json = manifest.at("metadata").dump();
    std::uint64_t expected_offset = 0;
    for (const auto& e : manifest.at("entries")) {
      CheckpointEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.shape = e.at("shape").get<Shape>();
      entry.dtype = e.at("dtype").get<std::string>();
      entry.offset = e.at("offset").get<std::uint64_t>();
      entry.trainable = e.value("trainable", true);
      if (entry.dtype != "f32") throw CorruptCheckpoint("unsupported dtype " + entry.dtype);
      if (entry.shape.empty()) throw CorruptCheckpoint("entry '" + entry.name + "' has no shape");
      if (entry.offset != expected_offset) {
        throw CorruptCheckpoint("entry '" + entry.name + "' has offset " +
                                std::to_string(entry.offset) + ", expected " +
                                std::to_string(expected_offset));
      }
      std::uint64_t count = 1;
      for (auto d : entry.shape) {
        if (d == 0) throw CorruptCheckpoint("entry '" + entry.name + "' has a zero dimension");
        count *= d;
      }
      expected_offset += 4 * count;
      ckpt.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("unreadable manifest: ") + e.what());
  }
  return ckpt;
}

std::uint64_t payload_bytes(const Checkpoint& ckpt) {
  std::uint64_t total = 0;
  for (const auto& e : ckpt.entries) {
    std::uint64_t n = 4;
    for (auto d : e.shape) n *= d;
    total += n;
  }
  return total;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParamStore& store, std::string_view metadata_json) {
  const std::string manifest = manifest_json(store, metadata_json);
  std::string buf(kCheckpointMagic);
  put_u32(buf, kCheckpointVersion);
  put_u32(buf, 0);
  put_u64(buf, manifest.size());
  buf += manifest;
  for (const auto& p : store.entries()) {
    for (double v : p.value.values()) {
      put_u32(buf, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("failed to write checkpoint");
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     std::string_view metadata_json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_checkpoint(out, store, metadata_json);
}

Checkpoint read_checkpoint_manifest(std::istream& in) {
  const Header header = read_header(in);
  return parse_manifest(read_exact(in, header.manifest_bytes, "manifest"));
}

Checkpoint read_checkpoint(std::istream& in, const ManifestCheck& check) {
  Checkpoint ckpt = read_checkpoint_manifest(in);
  if (check) check(ckpt);
  const std::uint64_t expected = payload_bytes(ckpt);
  const std::string payload = read_exact(in, expected, "payload");
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CorruptCheckpoint("trailing bytes after payload");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (const auto& e : ckpt.entries) {
    auto& param = ckpt.store.add(e.name, e.shape, e.trainable);
    const unsigned char* src = p + e.offset;
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      const auto bits = static_cast<std::uint32_t>(get_le(src + 4 * i, 4));
      param.value[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ManifestCheck& check) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in, check);
}

void restore_into(ParamStore& target, const Checkpoint& ckpt, std::string_view prefix) {
  std::size_t matched = 0;
  for (auto& p : target.entries()) {
    const std::string name = std::string(prefix) + p.name;
    if (!ckpt.store.contains(name)) {
      throw ShapeManifestMismatch("checkpoint lacks entry '" + name + "'");
    }
    const auto& src = ckpt.store.at(name);
    if (src.value.shape() != p.value.shape()) {
      throw ShapeManifestMismatch("entry '" + name + "' is " + shape_string(src.value.shape()) +
                                  " in the checkpoint but " + shape_string(p.value.shape()) +
                                  " in the model");
    }
    p.value = src.value;
    ++matched;
  }
  std::size_t under_prefix = 0;
  for (const auto& e : ckpt.entries) {
    if (e.name.compare(0, prefix.size(), prefix) == 0) ++under_prefix;
  }
  if (under_prefix != matched) {
    throw ShapeManifestMismatch("checkpoint holds " + std::to_string(under_prefix) +
                                " entries under '" + std::string(prefix) + "', model expects " +
                                std::to_string(matched));
  }
}

}  // namespace cuenet::nn
