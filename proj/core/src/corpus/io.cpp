#include "cuenet/corpus/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "cuenet/error.hpp"
#include "cuenet/text/tokenizer.hpp"
#include "json.hpp"

namespace cuenet::corpus {
namespace {

using nlohmann::json;

std::string_view trim_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

json parse_json_line(std::string_view line, std::size_t lineno) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw MalformedRecord(lineno, "expected a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw MalformedRecord(lineno, std::string("invalid JSON: ") + e.what());
  }
}

Label json_label(const json& v, std::size_t lineno) {
  if (v.is_boolean()) return label_from_bool(v.get<bool>());
  if (v.is_number_integer()) {
    const auto n = v.get<long long>();
    if (n == 0 || n == 1) return label_from_bool(n == 1);
    throw UnknownLabel(lineno, std::to_string(n));
  }
  if (v.is_string()) {
    if (auto l = parse_label(v.get<std::string>())) return *l;
    throw UnknownLabel(lineno, v.get<std::string>());
  }
  throw UnknownLabel(lineno, v.dump());
}

std::string json_string(const json& obj, const char* key, std::size_t lineno) {
  auto it = obj.find(key);
  if (it == obj.end()) throw MalformedRecord(lineno, std::string("missing field '") + key + "'");
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  throw MalformedRecord(lineno, std::string("field '") + key + "' must be a string");
}

text::TokenSequence json_tokens(const json& arr, std::size_t lineno) {
  if (!arr.is_array()) throw MalformedRecord(lineno, "'tokens' must be an array");
  text::TokenSequence out;
  for (const auto& t : arr) {
    if (!t.is_object() || !t.contains("surface") || !t["surface"].is_string()) {
      throw MalformedRecord(lineno, "token entries need a string 'surface'");
    }
    text::Token tok;
    tok.surface = t["surface"].get<std::string>();
    if (tok.surface.empty()) throw MalformedRecord(lineno, "empty token surface");
    if (t.contains("kind")) {
      auto kind = text::token_kind_from_string(t["kind"].get<std::string>());
      if (!kind) throw MalformedRecord(lineno, "unknown token kind");
      tok.kind = *kind;
    }
    out.push_back(std::move(tok));
  }
  return out;
}

std::string stem_of(std::string_view origin) {
  return std::filesystem::path(origin).stem().string();
}

void add_example(Dataset& d, Split split, Example ex, LoadReport* report) {
  if (report) ++report->records;
  if (ex.tokens.empty()) {
    if (report) ++report->dropped_empty;
    return;
  }
  d.split(split).push_back(std::move(ex));
}

void check_unique_ids(const Dataset& d) {
  std::unordered_set<std::string> seen;
  for (Split s : kAllSplits) {
    for (const auto& ex : d.split(s)) {
      if (!seen.insert(ex.id).second) {
        throw DataError("duplicate example id '" + ex.id + "' in dataset '" + d.name + "'");
      }
    }
  }
}

void read_into(Dataset& d, std::istream& in, DatasetFormat format,
               const text::TokenizerConfig& cfg, std::string_view origin, Split default_split,
               Source default_source, LoadReport* report) {
  const std::string stem = stem_of(origin);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim_cr(line);
    if (is_blank(view)) continue;
    Example ex;
    ex.source = default_source;
    Split split = default_split;
    if (format == DatasetFormat::tsv_label_text) {
      const auto tab = view.find('\t');
      if (tab == std::string_view::npos) throw MalformedRecord(lineno, "expected label<TAB>text");
      const auto label = parse_label(view.substr(0, tab));
      if (!label) throw UnknownLabel(lineno, std::string(view.substr(0, tab)));
      ex.label = *label;
      ex.text = std::string(view.substr(tab + 1));
      ex.id = stem + ":" + std::to_string(lineno);
      ex.tokens = text::tokenize(ex.text, cfg);
    } else {
      const json obj = parse_json_line(view, lineno);
      if (!obj.contains("label")) throw MalformedRecord(lineno, "missing field 'label'");
      ex.label = json_label(obj["label"], lineno);
      ex.id = obj.contains("id") ? json_string(obj, "id", lineno)
                                 : stem + ":" + std::to_string(lineno);
      if (obj.contains("text")) ex.text = json_string(obj, "text", lineno);
      if (obj.contains("tokens")) {
        ex.tokens = json_tokens(obj["tokens"], lineno);
      } else if (obj.contains("text")) {
        ex.tokens = text::tokenize(ex.text, cfg);
      } else {
        throw MalformedRecord(lineno, "record needs 'text' or 'tokens'");
      }
      if (obj.contains("split")) {
        auto s = split_from_string(json_string(obj, "split", lineno));
        if (!s) throw MalformedRecord(lineno, "unknown split");
        split = *s;
      }
      if (obj.contains("source")) {
        auto s = source_from_string(json_string(obj, "source", lineno));
        if (!s) throw MalformedRecord(lineno, "unknown source");
        ex.source = *s;
      }
    }
    add_example(d, split, std::move(ex), report);
  }
}

std::string_view extension_of(DatasetFormat format) {
  return format == DatasetFormat::jsonl ? ".jsonl" : ".tsv";
}

}  // namespace

std::optional<DatasetFormat> format_from_string(std::string_view s) {
  if (s == "tsv" || s == "tsv_label_text") return DatasetFormat::tsv_label_text;
  if (s == "jsonl") return DatasetFormat::jsonl;
  return std::nullopt;
}

Dataset read_dataset(std::istream& in, DatasetFormat format, const text::TokenizerConfig& cfg,
                     std::string_view origin, Split default_split, Source default_source,
                     LoadReport* report) {
  cfg.validate();
  Dataset d;
  d.name = stem_of(origin);
  read_into(d, in, format, cfg, origin, default_split, default_source, report);
  check_unique_ids(d);
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const text::TokenizerConfig& cfg, Source default_source,
                     LoadReport* report) {
  cfg.validate();
  Dataset d;
  if (std::filesystem::is_directory(path)) {
    d.name = path.filename().string();
    if (d.name.empty()) d.name = path.parent_path().filename().string();
    const std::string ext(extension_of(format));
    const std::pair<const char*, Split> files[] = {
        {"train", Split::train}, {"valid", Split::valid}, {"dev", Split::valid},
        {"test", Split::test}};
    for (const auto& [stem, split] : files) {
      const auto file = path / (std::string(stem) + ext);
      if (!std::filesystem::exists(file)) continue;
      auto in = open_input(file);
      read_into(d, in, format, cfg, file.string(), split, default_source, report);
    }
  } else {
    auto in = open_input(path);
    d.name = path.stem().string();
    read_into(d, in, format, cfg, path.string(), Split::train, default_source, report);
  }
  check_unique_ids(d);
  return d;
}

std::vector<SarcPair> read_sarc_pairs(std::istream& in, const text::TokenizerConfig& cfg,
                                      Source source) {
  cfg.validate();
  std::vector<SarcPair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim_cr(line);
    if (is_blank(view)) continue;
    const json obj = parse_json_line(view, lineno);
    SarcPair pair;
    pair.context_id = json_string(obj, "context_id", lineno);
    const std::string a = json_string(obj, "a", lineno);
    const std::string b = json_string(obj, "b", lineno);
    if (!obj.contains("sarcastic")) throw MalformedRecord(lineno, "missing field 'sarcastic'");
    const json& mark = obj["sarcastic"];
    bool a_sarcastic = false;
    bool b_sarcastic = false;
    if (mark.is_string()) {
      const auto s = mark.get<std::string>();
      if (s == "a") {
        a_sarcastic = true;
      } else if (s == "b") {
        b_sarcastic = true;
      } else if (s == "both" || s == "ab") {
        a_sarcastic = b_sarcastic = true;
      } else if (s != "none" && !s.empty()) {
        throw MalformedRecord(lineno, "'sarcastic' must be \"a\" or \"b\"");
      }
    } else if (mark.is_array()) {
      for (const auto& m : mark) {
        if (m == "a") {
          a_sarcastic = true;
        } else if (m == "b") {
          b_sarcastic = true;
        } else {
          throw MalformedRecord(lineno, "'sarcastic' entries must be \"a\" or \"b\"");
        }
      }
    } else if (!mark.is_null()) {
      throw MalformedRecord(lineno, "'sarcastic' must be \"a\" or \"b\"");
    }
    if (a_sarcastic == b_sarcastic) throw BothOrNeitherSarcastic(lineno, pair.context_id);
    pair.sarcastic_index = a_sarcastic ? Side::a : Side::b;

    auto make = [&](const std::string& text, const char* suffix, bool sarcastic) {
      Example ex;
      ex.id = pair.context_id + suffix;
      ex.text = text;
      ex.tokens = text::tokenize(text, cfg);
      ex.label = label_from_bool(sarcastic);
      ex.source = source;
      return ex;
    };
    pair.statement_a = make(a, "/a", a_sarcastic);
    pair.statement_b = make(b, "/b", b_sarcastic);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<SarcPair> load_sarc_pairs(const std::filesystem::path& path,
                                      const text::TokenizerConfig& cfg) {
  auto in = open_input(path);
  return read_sarc_pairs(in, cfg);
}

text::TokenizerConfig pool_tokenizer_config(text::TokenizerConfig base) {
  base.strip_artifact_hashtags = true;
  base.artifact_hashtags.insert("#sarcasm");
  base.artifact_hashtags.insert("#irony");
  return base;
}

AugmentationPool load_pool(const std::filesystem::path& path, DatasetFormat format,
                           const text::TokenizerConfig& cfg) {
  const Dataset d = load_dataset(path, format, cfg, Source::external);
  AugmentationPool pool;
  for (Split s : kAllSplits) {
    for (const auto& ex : d.split(s)) {
      Example copy = ex;
      copy.source = Source::external;
      (copy.label == Label::positive ? pool.positive : pool.negative).push_back(std::move(copy));
    }
  }
  return pool;
}

void write_dataset_jsonl(const Dataset& d, std::ostream& out) {
  for (Split s : kAllSplits) {
    for (const auto& ex : d.split(s)) {
      json tokens = json::array();
      for (const auto& t : ex.tokens) {
        tokens.push_back({{"surface", t.surface}, {"kind", std::string(text::to_string(t.kind))}});
      }
      json rec = {{"id", ex.id},
                  {"text", ex.text},
                  {"label", to_int(ex.label)},
                  {"split", std::string(to_string(s))},
                  {"source", std::string(to_string(ex.source))},
                  {"tokens", std::move(tokens)}};
      out << rec.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
  }
}

std::vector<text::TokenSequence> load_sentences(const std::filesystem::path& path,
                                                const text::TokenizerConfig& cfg) {
  auto in = open_input(path);
  std::vector<text::TokenSequence> out;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    auto tokens = text::tokenize(trim_cr(line), cfg);
    if (!tokens.empty()) out.push_back(std::move(tokens));
  }
  return out;
}

}  // namespace cuenet::corpus
