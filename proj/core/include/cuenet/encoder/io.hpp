#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cuenet/encoder/encoder.hpp"
#include "cuenet/nn/checkpoint.hpp"

namespace cuenet::encoder {

/// Everything besides parameter values needed to rebuild an encoder.
struct EncoderSpec {
  EncoderConfig config;
  CharVocab chars;
  WordVocab words;
};

/// JSON object describing the encoder's configuration and vocabularies.
std::string encoder_metadata_json(const EncoderModel& model);
/// Throws CorruptCheckpoint when the description is unreadable.
EncoderSpec parse_encoder_metadata(std::string_view json);

/// Throws ShapeManifestMismatch unless the checkpoint holds, under
/// `prefix`, exactly the entries an encoder built from `spec` has, with
/// identical shapes.
void check_encoder_manifest(const EncoderSpec& spec, const nn::Checkpoint& manifest,
                            std::string_view prefix = "");
/// Copies the entries under `prefix` into a new, frozen encoder.
EncoderModel encoder_from_checkpoint(const EncoderSpec& spec, const nn::Checkpoint& ckpt,
                                     std::string_view prefix = "");

void save_encoder(const std::filesystem::path& path, const EncoderModel& model);
/// The returned encoder is frozen. Throws CorruptCheckpoint or
/// ShapeManifestMismatch.
EncoderModel load_encoder(const std::filesystem::path& path);

}  // namespace cuenet::encoder
