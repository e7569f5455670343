#pragma once

// Generated corpora and reference oracles shared by the unit tests and the
// acceptance runner.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cuenet/classifier/model.hpp"
#include "cuenet/corpus/augment.hpp"
#include "cuenet/corpus/dataset.hpp"
#include "cuenet/encoder/encoder.hpp"
#include "cuenet/eval/metrics.hpp"
#include "cuenet/text/token.hpp"

namespace cuenet::testing {

struct LabeledText {
  std::string text;
  Label label;
};

/// Label 1 exactly when a sentence has an all-caps word and ends in a
/// non-artifact hashtag or emoji. Negatives are near misses: half carry the
/// trailing cue without caps, 30% caps without the cue, 20% neither. A
/// tokenizer that loses case therefore cannot beat 0.75.
std::vector<LabeledText> cue_corpus(std::size_t n, std::uint64_t seed);

/// Lowercases ASCII, drops punctuation (including '#' and '@') and splits
/// on whitespace: a tokenizer that discards the cues.
text::TokenSequence control_tokenize(std::string_view raw);

using Tokenizer = std::function<text::TokenSequence(std::string_view)>;

/// 80/10/10 train/valid/test split in order, ids "ex<i>".
corpus::Dataset make_dataset(const std::vector<LabeledText>& records, const Tokenizer& tokenize,
                             std::string name = "fixture");

/// `n` short random sentences with coin-flip labels, all in train (valid
/// and test copy the first example so they are non-empty).
corpus::Dataset random_label_dataset(std::size_t n, std::uint64_t seed);

/// Sentences repeating "a b c" cyclically.
std::vector<text::TokenSequence> cyclic_corpus(std::size_t sentences, std::size_t length);

/// Examples of the given token counts, words "w0 w1 ...", alternating labels.
corpus::Dataset length_fixture(const std::vector<std::size_t>& lengths);

/// Target tagged #mondays plus a 5-item pool: 3 positives and 2 negatives
/// carrying #mondays.
struct AugmentFixture {
  corpus::Dataset target;
  corpus::AugmentationPool pool;
};
AugmentFixture augment_fixture();

/// `n` pairs; statement text encodes the truth so scorers can cheat.
std::vector<corpus::SarcPair> sarc_fixture(std::size_t n, std::uint64_t seed);

/// Straight recount from the definitions, used as the metrics oracle.
eval::Metrics brute_force_metrics(std::span<const Label> predictions,
                                  std::span<const Label> labels, eval::Averaging averaging);

/// Small encoder and classifier for fast tests.
encoder::EncoderConfig tiny_encoder_config();
std::shared_ptr<encoder::EncoderModel> tiny_encoder(std::span<const text::TokenSequence> corpus,
                                                    std::uint64_t seed = 7);
classifier::ClassifierConfig tiny_classifier_config(const encoder::EncoderConfig& enc);

/// Token sequences of every example in every split.
std::vector<text::TokenSequence> all_sentences(const corpus::Dataset& d);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace cuenet::testing
