#include "cuenet/classifier/config.hpp"

#include "cuenet/error.hpp"
#include "json.hpp"

namespace cuenet::classifier {

using nlohmann::json;

void ClassifierConfig::validate() const {
  if (d_ctx == 0 || lstm_hidden == 0 || ffn_units == 0) {
    throw UsageError("classifier widths must be positive");
  }
  if (batch_size == 0) throw UsageError("batch_size must be positive");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw UsageError("dropout_p must be in [0, 1)");
  if (allow_nonstandard) return;
  if (dropout_p < 0.1 || dropout_p > 0.5) {
    throw UsageError("dropout_p must be within [0.1, 0.5] (set allow_nonstandard to override)");
  }
  if (batch_size != 16 && batch_size != 32 && batch_size != 64) {
    throw UsageError("batch_size must be 16, 32 or 64 (set allow_nonstandard to override)");
  }
}

ClassifierConfig ClassifierConfig::paper_scale() {
  ClassifierConfig c;
  c.d_ctx = 1024;
  c.lstm_hidden = 1024;
  c.ffn_units = 512;
  return c;
}

std::string ClassifierConfig::to_json() const {
  return json{{"d_ctx", d_ctx},
              {"lstm_hidden", lstm_hidden},
              {"ffn_units", ffn_units},
              {"dropout_p", dropout_p},
              {"batch_size", batch_size},
              {"allow_nonstandard", allow_nonstandard}}
      .dump();
}

ClassifierConfig ClassifierConfig::from_json(std::string_view text) {
  ClassifierConfig c;
  try {
    const json j = json::parse(text);
    c.d_ctx = j.at("d_ctx").get<std::size_t>();
    c.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
    c.ffn_units = j.at("ffn_units").get<std::size_t>();
    c.dropout_p = j.at("dropout_p").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.allow_nonstandard = j.value("allow_nonstandard", false);
  } catch (const json::exception& e) {
    throw CorruptCheckpoint(std::string("bad classifier config: ") + e.what());
  }
  return c;
}

}  // namespace cuenet::classifier
