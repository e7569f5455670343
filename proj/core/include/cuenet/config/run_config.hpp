#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cuenet/classifier/config.hpp"
#include "cuenet/encoder/config.hpp"
#include "cuenet/text/token.hpp"
#include "cuenet/train/trainer.hpp"

namespace cuenet::config {

/// Environment variable naming a config file used when none is passed.
inline constexpr std::string_view kConfigEnvVar = "CUENET_CONFIG";

/// Every setting of a run. Text form is one `key = value` per line; `#`
/// starts a comment line. Keys:
///
///   tokenizer   strip_artifact_hashtags artifact_hashtags max_token_chars
///   encoder     d_char filters d_word n_layers d_lm mix_mode highway_layers
///               lm_dropout max_vocab max_word_chars
///   classifier  lstm_hidden_per_direction ffn_units dropout_p batch_size
///               allow_nonstandard
///   train       lr0 decay_factor plateau_patience min_lr max_epochs
///               early_stop_patience clip_norm seed
///   pretraining lm_epochs lm_lr lm_batch_size
///   data        format truncate min_tokens
///   runs        ensemble_size threads encoder
///
/// Lists are comma-separated; `filters` entries are width:count. `truncate`
/// and `encoder` accept an empty value for "none". The classifier's input
/// width always follows the encoder (2 * d_lm).
struct RunConfig {
  text::TokenizerConfig tokenizer;
  encoder::EncoderConfig encoder;
  classifier::ClassifierConfig classifier;
  train::TrainConfig train;

  std::size_t lm_epochs = 10;
  double lm_lr = 1e-3;
  std::size_t lm_batch_size = 16;

  std::string format = "tsv";
  std::optional<std::size_t> truncate;
  std::size_t min_tokens = 5;

  std::size_t ensemble_size = 1;
  std::size_t threads = 1;
  /// Pretrained encoder checkpoint; empty means a fresh encoder built from
  /// the training data.
  std::string encoder_path;

  /// Throws UsageError for an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  /// Every key with its current value, in documentation order.
  std::vector<std::pair<std::string, std::string>> items() const;
  static const std::vector<std::string>& keys();

  /// Throws UsageError for invalid combinations.
  void validate() const;
  std::string to_text() const;

  /// Applies `key = value` lines on top of the current values. Throws
  /// UsageError naming the line on errors, including a repeated key.
  void merge(std::istream& in, std::string_view origin = "config");
  void merge_file(const std::filesystem::path& path);
  /// "key=value".
  void apply_override(std::string_view assignment);

  static RunConfig preset(std::string_view name);
  static std::vector<std::string> preset_names();
};

}  // namespace cuenet::config
