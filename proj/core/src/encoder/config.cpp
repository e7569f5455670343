#include "cuenet/encoder/config.hpp"

#include "cuenet/error.hpp"
#include "json.hpp"

namespace cuenet::encoder {

using nlohmann::json;

std::string_view to_string(MixMode mode) {
  return mode == MixMode::top_layer ? "top_layer" : "learned_scalar_mix";
}

std::optional<MixMode> mix_mode_from_string(std::string_view s) {
  if (s == "top_layer") return MixMode::top_layer;
  if (s == "learned_scalar_mix" || s == "scalar_mix") return MixMode::learned_scalar_mix;
  return std::nullopt;
}

std::size_t EncoderConfig::filter_total() const {
  std::size_t total = 0;
  for (const auto& f : filters) total += f.count;
  return total;
}

void EncoderConfig::validate() const {
  if (d_char == 0) throw UsageError("encoder d_char must be positive");
  if (filters.empty()) throw UsageError("encoder needs at least one filter group");
  for (const auto& f : filters) {
    if (f.width == 0) throw UsageError("filter width must be positive");
  }
  if (filter_total() == 0) throw UsageError("encoder filter counts must sum to at least 1");
  if (d_word == 0 || d_lm == 0) throw UsageError("encoder d_word and d_lm must be positive");
  if (n_layers == 0) throw UsageError("encoder n_layers must be at least 1");
  if (!(lm_dropout >= 0.0 && lm_dropout < 1.0)) throw UsageError("lm_dropout must be in [0, 1)");
  if (max_vocab == 0) throw UsageError("encoder max_vocab must be positive");
  if (max_word_chars == 0) throw UsageError("encoder max_word_chars must be positive");
  if (mix_mode == MixMode::learned_scalar_mix && d_word != d_lm && d_word != 2 * d_lm) {
    throw UsageError("learned_scalar_mix needs d_word equal to d_lm or 2*d_lm");
  }
}

EncoderConfig EncoderConfig::paper_scale() {
  EncoderConfig c;
  c.d_char = 16;
  c.filters = {{1, 32}, {2, 32}, {3, 64}, {4, 128}, {5, 256}, {6, 512}, {7, 1024}};
  c.d_word = 1024;
  c.n_layers = 2;
  c.d_lm = 512;
  c.highway_layers = 2;
  c.max_vocab = 10000;
  return c;
}

std::string EncoderConfig::to_json() const {
  json filters_json = json::array();
  for (const auto& f : filters) filters_json.push_back({f.width, f.count});
  json j = {{"d_char", d_char},
            {"filters", filters_json},
            {"d_word", d_word},
            {"n_layers", n_layers},
            {"d_lm", d_lm},
            {"mix_mode", std::string(to_string(mix_mode))},
            {"highway_layers", highway_layers},
            {"lm_dropout", lm_dropout},
            {"max_vocab", max_vocab},
            {"max_word_chars", max_word_chars}};
  return j.dump();
}

EncoderConfig EncoderConfig::from_json(std::string_view text) {
  EncoderConfig c;
  try {
    const json j = json::parse(text);
    c.d_char = j.at("d_char").get<std::size_t>();
    c.filters.clear();
    for (const auto& f : j.at("filters")) {
      c.filters.push_back({f.at(0).get<std::size_t>(), f.at(1).get<std::size_t>()});
    }
    c.d_word = j.at("d_word").get<std::size_t>();
    c.n_layers = j.at("n_layers").get<std::size_t>();
    c.d_lm = j.at("d_lm").get<std::size_t>();
    const auto mode = mix_mode_from_string(j.at("mix_mode").get<std::string>());
    if (!mode) throw CorruptCheckpoint("unknown mix_mode in encoder metadata");
    c.mix_mode = *mode;
    c.highway_layers = j.value("highway_layers", std::size_t{0});
    c.lm_dropout = j.value("lm_dropout", 0.0);
    c.max_vocab = j.value("max_vocab", std::size_t{10000});
    c.max_word_chars = j.value("max_word_chars", std::size_t{50});
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("bad encoder config: ") + e.what());
  }
  return c;
}

}  // namespace cuenet::encoder
