#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace cuenet::classifier {

struct ClassifierConfig {
  /// Width of the contextual vectors; must match the encoder.
  std::size_t d_ctx = 128;
  std::size_t lstm_hidden = 64;  // per direction
  std::size_t ffn_units = 32;
  double dropout_p = 0.1;
  std::size_t batch_size = 16;
  /// Permits dropout outside [0.1, 0.5] and batch sizes other than
  /// 16, 32 and 64.
  bool allow_nonstandard = false;

  /// Throws UsageError.
  void validate() const;

  /// 1024 units per direction (2048 concatenated) and 512-unit FFN layers.
  static ClassifierConfig paper_scale();

  std::string to_json() const;
  static ClassifierConfig from_json(std::string_view json);

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

}  // namespace cuenet::classifier
