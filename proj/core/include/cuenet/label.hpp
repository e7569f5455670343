#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace cuenet {

/// Binary target: 1 means sarcastic or ironic.
enum class Label : std::uint8_t { negative = 0, positive = 1 };

constexpr int to_int(Label l) { return static_cast<int>(l); }

constexpr Label label_from_bool(bool positive) {
  return positive ? Label::positive : Label::negative;
}

/// Accepts exactly "0" or "1".
inline std::optional<Label> parse_label(std::string_view s) {
  if (s == "0") return Label::negative;
  if (s == "1") return Label::positive;
  return std::nullopt;
}

}  // namespace cuenet
