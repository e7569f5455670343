#include "cuenet/classifier/io.hpp"

#include <fstream>
#include <map>
#include <optional>

#include "cuenet/encoder/io.hpp"
#include "cuenet/error.hpp"
#include "json.hpp"

namespace cuenet::classifier {

using nlohmann::json;

namespace {

constexpr std::string_view kKind = "classifier";

struct Spec {
  ClassifierConfig config;
  encoder::EncoderSpec encoder;
};

Spec parse_metadata(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("kind", std::string()) != kKind) {
      throw CorruptCheckpoint("not a classifier checkpoint");
    }
    return Spec{ClassifierConfig::from_json(j.at("config").dump()),
                encoder::parse_encoder_metadata(j.at("encoder").dump())};
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("bad classifier metadata: ") + e.what());
  }
}

bool under_encoder(const std::string& name) {
  return name.compare(0, kEncoderPrefix.size(), kEncoderPrefix) == 0;
}

// Classifier entries must match a freshly built model exactly; the
// encoder's are checked against its own description.
void check_manifest(const Spec& spec, const nn::Checkpoint& manifest) {
  encoder::check_encoder_manifest(spec.encoder, manifest, kEncoderPrefix);
  auto enc = std::make_shared<encoder::EncoderModel>(spec.encoder.config, spec.encoder.chars,
                                                     spec.encoder.words, 0);
  const ClassifierModel reference(spec.config, enc, 0);
  std::map<std::string, const nn::CheckpointEntry*> found;
  for (const auto& e : manifest.entries) {
    if (!under_encoder(e.name)) found.emplace(e.name, &e);
  }
  for (const auto& p : reference.params().entries()) {
    auto it = found.find(p.name);
    if (it == found.end()) throw ShapeManifestMismatch("missing entry '" + p.name + "'");
    if (it->second->shape != p.value.shape()) {
      throw ShapeManifestMismatch("entry '" + p.name + "' is " +
                                  nn::shape_string(it->second->shape) + ", the classifier needs " +
                                  nn::shape_string(p.value.shape()));
    }
    found.erase(it);
  }
  if (!found.empty()) {
    throw ShapeManifestMismatch("unexpected entry '" + found.begin()->first + "'");
  }
}

}  // namespace

nn::ParamStore combined_params(const ClassifierModel& model) {
  nn::ParamStore store;
  for (const auto& p : model.params().entries()) {
    store.add(p.name, p.value.shape(), p.trainable).value = p.value;
  }
  for (const auto& p : model.encoder().params().entries()) {
    store.add(std::string(kEncoderPrefix) + p.name, p.value.shape(), p.trainable).value = p.value;
  }
  return store;
}

std::string classifier_metadata_json(const ClassifierModel& model) {
  json j = {{"kind", kKind},
            {"config", json::parse(model.config().to_json())},
            {"encoder", json::parse(encoder::encoder_metadata_json(model.encoder()))}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

void write_classifier(std::ostream& out, const ClassifierModel& model) {
  nn::write_checkpoint(out, combined_params(model), classifier_metadata_json(model));
}

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model) {
  nn::save_checkpoint(path, combined_params(model), classifier_metadata_json(model));
}

ClassifierModel read_classifier(std::istream& in) {
  std::optional<Spec> spec;
  const nn::Checkpoint ckpt = nn::read_checkpoint(in, [&](const nn::Checkpoint& manifest) {
    spec = parse_metadata(manifest.metadata_json);
    check_manifest(*spec, manifest);
  });
  auto enc = std::make_shared<encoder::EncoderModel>(
      encoder::encoder_from_checkpoint(spec->encoder, ckpt, kEncoderPrefix));
  nn::ParamStore params;
  for (const auto& p : ckpt.store.entries()) {
    if (!under_encoder(p.name)) params.add(p.name, p.value.shape(), true).value = p.value;
  }
  return ClassifierModel::from_parts(spec->config, std::move(enc), std::move(params));
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return read_classifier(in);
}

}  // namespace cuenet::classifier
