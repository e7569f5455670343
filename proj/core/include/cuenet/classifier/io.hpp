#pragma once

#include <filesystem>
#include <string>

#include "cuenet/classifier/model.hpp"
#include "cuenet/nn/checkpoint.hpp"

namespace cuenet::classifier {

/// Encoder entries are stored under this prefix next to the classifier's
/// own, so one file restores the whole model.
inline constexpr std::string_view kEncoderPrefix = "encoder/";

/// Classifier and encoder parameters in one store, classifier first.
nn::ParamStore combined_params(const ClassifierModel& model);
std::string classifier_metadata_json(const ClassifierModel& model);

void write_classifier(std::ostream& out, const ClassifierModel& model);
void save_classifier(const std::filesystem::path& path, const ClassifierModel& model);
/// The embedded encoder comes back frozen. Throws CorruptCheckpoint or
/// ShapeManifestMismatch.
ClassifierModel read_classifier(std::istream& in);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace cuenet::classifier
