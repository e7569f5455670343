#include "cuenet/config/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "cuenet/error.hpp"

namespace cuenet::config {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("'" + std::string(key) + "' expects an unsigned integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError("'" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("'" + std::string(key) + "' expects true or false, got '" + std::string(v) +
                   "'");
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

#define CUENET_SIZE_FIELD(name, member)                                      \
  Field {                                                                    \
    name, [](const RunConfig& c) { return std::to_string(c.member); },       \
        [](RunConfig& c, std::string_view v) { c.member = parse_size(name, v); } \
  }
#define CUENET_DOUBLE_FIELD(name, member)                                    \
  Field {                                                                    \
    name, [](const RunConfig& c) { return format_double(c.member); },        \
        [](RunConfig& c, std::string_view v) { c.member = parse_double(name, v); } \
  }
#define CUENET_BOOL_FIELD(name, member)                                      \
  Field {                                                                    \
    name, [](const RunConfig& c) { return format_bool(c.member); },          \
        [](RunConfig& c, std::string_view v) { c.member = parse_bool(name, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      CUENET_BOOL_FIELD("strip_artifact_hashtags", tokenizer.strip_artifact_hashtags),
      Field{"artifact_hashtags",
            [](const RunConfig& c) {
              std::string out;
              for (const auto& tag : c.tokenizer.artifact_hashtags) {
                if (!out.empty()) out += ",";
                out += tag;
              }
              return out;
            },
            [](RunConfig& c, std::string_view v) {
              c.tokenizer.artifact_hashtags.clear();
              for (auto tag : split_list(v)) c.tokenizer.artifact_hashtags.emplace(tag);
            }},
      CUENET_SIZE_FIELD("max_token_chars", tokenizer.max_token_chars),

      CUENET_SIZE_FIELD("d_char", encoder.d_char),
      Field{"filters",
            [](const RunConfig& c) {
              std::string out;
              for (const auto& f : c.encoder.filters) {
                if (!out.empty()) out += ",";
                out += std::to_string(f.width) + ":" + std::to_string(f.count);
              }
              return out;
            },
            [](RunConfig& c, std::string_view v) {
              std::vector<encoder::FilterSpec> filters;
              for (auto item : split_list(v)) {
                const auto colon = item.find(':');
                if (colon == std::string_view::npos) {
                  throw UsageError("'filters' entries must be width:count, got '" +
                                   std::string(item) + "'");
                }
                filters.push_back({parse_size("filters", trim(item.substr(0, colon))),
                                   parse_size("filters", trim(item.substr(colon + 1)))});
              }
              c.encoder.filters = std::move(filters);
            }},
      CUENET_SIZE_FIELD("d_word", encoder.d_word),
      CUENET_SIZE_FIELD("n_layers", encoder.n_layers),
      CUENET_SIZE_FIELD("d_lm", encoder.d_lm),
      Field{"mix_mode",
            [](const RunConfig& c) { return std::string(encoder::to_string(c.encoder.mix_mode)); },
            [](RunConfig& c, std::string_view v) {
              const auto mode = encoder::mix_mode_from_string(v);
              if (!mode) {
                throw UsageError("'mix_mode' must be top_layer or learned_scalar_mix, got '" +
                                 std::string(v) + "'");
              }
              c.encoder.mix_mode = *mode;
            }},
      CUENET_SIZE_FIELD("highway_layers", encoder.highway_layers),
      CUENET_DOUBLE_FIELD("lm_dropout", encoder.lm_dropout),
      CUENET_SIZE_FIELD("max_vocab", encoder.max_vocab),
      CUENET_SIZE_FIELD("max_word_chars", encoder.max_word_chars),

      CUENET_SIZE_FIELD("lstm_hidden_per_direction", classifier.lstm_hidden),
      CUENET_SIZE_FIELD("ffn_units", classifier.ffn_units),
      CUENET_DOUBLE_FIELD("dropout_p", classifier.dropout_p),
      CUENET_SIZE_FIELD("batch_size", classifier.batch_size),
      CUENET_BOOL_FIELD("allow_nonstandard", classifier.allow_nonstandard),

      CUENET_DOUBLE_FIELD("lr0", train.lr0),
      CUENET_DOUBLE_FIELD("decay_factor", train.decay_factor),
      CUENET_SIZE_FIELD("plateau_patience", train.plateau_patience),
      CUENET_DOUBLE_FIELD("min_lr", train.min_lr),
      CUENET_SIZE_FIELD("max_epochs", train.max_epochs),
      CUENET_SIZE_FIELD("early_stop_patience", train.early_stop_patience),
      CUENET_DOUBLE_FIELD("clip_norm", train.clip_norm),
      Field{"seed", [](const RunConfig& c) { return std::to_string(c.train.seed); },
            [](RunConfig& c, std::string_view v) { c.train.seed = parse_u64("seed", v); }},

      CUENET_SIZE_FIELD("lm_epochs", lm_epochs),
      CUENET_DOUBLE_FIELD("lm_lr", lm_lr),
      CUENET_SIZE_FIELD("lm_batch_size", lm_batch_size),

      Field{"format", [](const RunConfig& c) { return c.format; },
            [](RunConfig& c, std::string_view v) {
              if (v != "tsv" && v != "jsonl") {
                throw UsageError("'format' must be tsv or jsonl, got '" + std::string(v) + "'");
              }
              c.format = std::string(v);
            }},
      Field{"truncate",
            [](const RunConfig& c) {
              return c.truncate ? std::to_string(*c.truncate) : std::string();
            },
            [](RunConfig& c, std::string_view v) {
              if (v.empty() || v == "none") {
                c.truncate.reset();
              } else {
                c.truncate = parse_size("truncate", v);
              }
            }},
      CUENET_SIZE_FIELD("min_tokens", min_tokens),

      CUENET_SIZE_FIELD("ensemble_size", ensemble_size),
      CUENET_SIZE_FIELD("threads", threads),
      Field{"encoder", [](const RunConfig& c) { return c.encoder_path; },
            [](RunConfig& c, std::string_view v) { c.encoder_path = std::string(v); }},
  };
  return table;
}

#undef CUENET_SIZE_FIELD
#undef CUENET_DOUBLE_FIELD
#undef CUENET_BOOL_FIELD

const Field& field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  field(key).set(*this, trim(value));
  if (key == "d_lm") classifier.d_ctx = encoder.d_ctx();
}

std::string RunConfig::get(std::string_view key) const { return field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return names;
}

std::vector<std::pair<std::string, std::string>> RunConfig::items() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void RunConfig::validate() const {
  tokenizer.validate();
  encoder.validate();
  if (classifier.d_ctx != encoder.d_ctx()) {
    throw UsageError("classifier input width must equal 2 * d_lm");
  }
  classifier.validate();
  train.validate();
  if (lm_epochs == 0 || lm_batch_size == 0) {
    throw UsageError("lm_epochs and lm_batch_size must be positive");
  }
  if (!(lm_lr > 0.0)) throw UsageError("lm_lr must be positive");
  if (min_tokens == 0) throw UsageError("min_tokens must be at least 1");
  if (truncate && *truncate < min_tokens) throw UsageError("truncate must be at least min_tokens");
  if (ensemble_size == 0) throw UsageError("ensemble_size must be at least 1");
  if (threads == 0) throw UsageError("threads must be at least 1");
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : items()) out += k + " = " + v + "\n";
  return out;
}

void RunConfig::merge(std::istream& in, std::string_view origin) {
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw UsageError(where + "expected key = value");
    const auto key = trim(view.substr(0, eq));
    if (!seen.emplace(key).second) {
      throw UsageError(where + "key '" + std::string(key) + "' set twice");
    }
    try {
      set(key, view.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(where + e.what());
    }
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  merge(in, path.string());
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw UsageError("override '" + std::string(assignment) + "' must be key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

RunConfig RunConfig::preset(std::string_view name) {
  RunConfig c;
  if (name == "desk") return c;
  if (name == "paper-scale" || name == "paper_scale") {
    c.encoder = encoder::EncoderConfig::paper_scale();
    c.classifier = classifier::ClassifierConfig::paper_scale();
    c.classifier.d_ctx = c.encoder.d_ctx();
    c.ensemble_size = train::kDefaultEnsembleSize;
    return c;
  }
  throw UsageError("unknown preset '" + std::string(name) + "' (desk, paper-scale)");
}

std::vector<std::string> RunConfig::preset_names() { return {"desk", "paper-scale"}; }

}  // namespace cuenet::config
