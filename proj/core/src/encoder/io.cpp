#include "cuenet/encoder/io.hpp"

#include <map>

#include "cuenet/error.hpp"
#include "json.hpp"

namespace cuenet::encoder {

using nlohmann::json;

namespace {

constexpr std::string_view kKind = "encoder";

json metadata_object(const EncoderModel& model) {
  std::vector<std::uint32_t> cps(model.char_vocab().codepoints().begin(),
                                 model.char_vocab().codepoints().end());
  return {{"kind", kKind},
          {"config", json::parse(model.config().to_json())},
          {"char_vocab", cps},
          {"word_vocab", model.word_vocab().words()}};
}

}  // namespace

std::string encoder_metadata_json(const EncoderModel& model) {
  return metadata_object(model).dump(-1, ' ', false, json::error_handler_t::replace);
}

EncoderSpec parse_encoder_metadata(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", std::string()) != kKind) {
      throw CorruptCheckpoint("not an encoder checkpoint");
    }
    std::vector<char32_t> cps;
    for (const auto& cp : j.at("char_vocab")) cps.push_back(cp.get<std::uint32_t>());
    return EncoderSpec{EncoderConfig::from_json(j.at("config").dump()),
                       CharVocab::from_codepoints(std::move(cps)),
                       WordVocab::from_words(j.at("word_vocab").get<std::vector<std::string>>())};
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("bad encoder metadata: ") + e.what());
  } catch (const CorruptCheckpoint&) {
    throw;
  } catch (const Error& e) {
    throw CorruptCheckpoint(e.what());
  }
}

void check_encoder_manifest(const EncoderSpec& spec, const nn::Checkpoint& manifest,
                            std::string_view prefix) {
  const EncoderModel reference(spec.config, spec.chars, spec.words, 0);
  std::map<std::string, const nn::CheckpointEntry*> found;
  for (const auto& e : manifest.entries) {
    if (e.name.compare(0, prefix.size(), prefix) == 0) found.emplace(e.name, &e);
  }
  for (const auto& p : reference.params().entries()) {
    const std::string name = std::string(prefix) + p.name;
    auto it = found.find(name);
    if (it == found.end()) throw ShapeManifestMismatch("missing entry '" + name + "'");
    if (it->second->shape != p.value.shape()) {
      throw ShapeManifestMismatch("entry '" + name + "' is " +
                                  nn::shape_string(it->second->shape) + ", the encoder needs " +
                                  nn::shape_string(p.value.shape()));
    }
    found.erase(it);
  }
  if (!found.empty()) {
    throw ShapeManifestMismatch("unexpected entry '" + found.begin()->first + "'");
  }
}

EncoderModel encoder_from_checkpoint(const EncoderSpec& spec, const nn::Checkpoint& ckpt,
                                     std::string_view prefix) {
  EncoderModel model(spec.config, spec.chars, spec.words, 0);
  nn::restore_into(model.params(), ckpt, prefix);
  model.freeze();
  return model;
}

void save_encoder(const std::filesystem::path& path, const EncoderModel& model) {
  nn::save_checkpoint(path, model.params(), encoder_metadata_json(model));
}

EncoderModel load_encoder(const std::filesystem::path& path) {
  std::optional<EncoderSpec> spec;
  const nn::Checkpoint ckpt = nn::load_checkpoint(path, [&](const nn::Checkpoint& manifest) {
    spec = parse_encoder_metadata(manifest.metadata_json);
    check_encoder_manifest(*spec, manifest);
  });
  return encoder_from_checkpoint(*spec, ckpt);
}

}  // namespace cuenet::encoder
