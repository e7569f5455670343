#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cuenet::encoder {

enum class MixMode { top_layer, learned_scalar_mix };

std::string_view to_string(MixMode mode);
std::optional<MixMode> mix_mode_from_string(std::string_view s);

struct FilterSpec {
  std::size_t width = 0;
  std::size_t count = 0;
  friend bool operator==(const FilterSpec&, const FilterSpec&) = default;
};

struct EncoderConfig {
  std::size_t d_char = 16;
  std::vector<FilterSpec> filters{{1, 8}, {2, 8}, {3, 16}};
  std::size_t d_word = 64;
  std::size_t n_layers = 2;
  /// Hidden width of each LM direction; contextual vectors are twice this.
  std::size_t d_lm = 64;
  MixMode mix_mode = MixMode::top_layer;
  std::size_t highway_layers = 0;
  /// Dropout on LSTM inputs while pretraining the language model.
  double lm_dropout = 0.0;
  /// LM softmax covers this many words plus "<unk>".
  std::size_t max_vocab = 10000;
  /// Longer words keep only their first codepoints.
  std::size_t max_word_chars = 50;

  /// Throws UsageError. A learned scalar mix needs the character layer to
  /// line up with the LM layers: d_word must equal d_lm (the vector enters
  /// the mix duplicated) or 2 * d_lm.
  void validate() const;

  std::size_t filter_total() const;
  std::size_t d_ctx() const { return 2 * d_lm; }

  /// Dimensions of the full-size model: 512-per-direction LM giving
  /// 1024-wide contextual vectors over a 2048-filter character CNN.
  static EncoderConfig paper_scale();

  /// Round trip through the JSON text stored in checkpoint metadata.
  std::string to_json() const;
  static EncoderConfig from_json(std::string_view json);

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

}  // namespace cuenet::encoder
