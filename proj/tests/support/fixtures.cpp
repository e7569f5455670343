#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>

#include "cuenet/encoder/language_model.hpp"
#include "cuenet/rng.hpp"
#include "cuenet/text/tokenizer.hpp"
#include "cuenet/text/unicode.hpp"

namespace cuenet::testing {

namespace {

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the",   "day",     "was",    "just",   "great",  "love",    "work",   "again",
      "today", "really",  "people", "this",   "that",   "so",      "much",   "fun",
      "more",  "meeting", "coffee", "rain",   "traffic", "monday", "mondays", "blessed",
      "fail",  "weekend", "best",   "ever",   "thanks", "waiting", "bus",    "train",
      "late",  "early",   "boss",   "email",  "phone",  "battery", "dead",   "nice",
      "cold",  "hot",     "summer", "winter", "game",   "team",    "won",    "lost",
      "what",  "a",       "surprise", "never", "always", "party",  "homework", "sleep"};
  return words;
}

const std::vector<std::string>& hashtags() {
  static const std::vector<std::string> tags = {"#mondays", "#blessed", "#fail", "#weekend",
                                                "#coffee"};
  return tags;
}

const std::vector<std::string>& emojis() {
  static const std::vector<std::string> list = {"\U0001F624", "\U0001F602", "\U0001F644",
                                                "\U0001F60D", "\U0001F389"};
  return list;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

// Words drawn by cue_corpus. Each all-caps form is just another random
// vector to a frozen, untrained character CNN, so the classifier has to
// learn every caps word type; a small vocabulary keeps that feasible.
constexpr std::size_t kCueVocabulary = 24;

std::vector<LabeledText> cue_corpus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const auto& words = filler_words();
  std::vector<LabeledText> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = rng.uniform() < 0.5;
    bool caps = true;
    bool cue = true;
    if (!positive) {
      const double r = rng.uniform();
      caps = r >= 0.5 && r < 0.8;
      cue = r < 0.5;
    }
    const std::size_t len = 5 + rng.index(6);
    std::vector<std::string> tokens;
    for (std::size_t k = 0; k < len; ++k) {
      std::string w = words[rng.index(kCueVocabulary)];
      while (w.size() < 2) w = words[rng.index(kCueVocabulary)];
      tokens.push_back(w);
    }
    if (caps) {
      const std::size_t at = rng.index(len);
      tokens[at] = upper(tokens[at]);
    }
    if (cue) {
      tokens.push_back(rng.uniform() < 0.5 ? hashtags()[rng.index(hashtags().size())]
                                           : emojis()[rng.index(emojis().size())]);
    }
    std::string text;
    for (const auto& t : tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    out.push_back({text, positive ? Label::positive : Label::negative});
  }
  return out;
}

text::TokenSequence control_tokenize(std::string_view raw) {
  text::TokenSequence out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back({current, text::TokenKind::word});
    current.clear();
  };
  const auto cps = text::decode_utf8(raw);
  for (char32_t cp : cps) {
    if (text::is_space(cp)) {
      flush();
    } else if (text::is_punctuation(cp)) {
      continue;
    } else {
      current += text::encode_utf8(text::is_ascii_upper(cp) ? cp - U'A' + U'a' : cp);
    }
  }
  flush();
  return out;
}

corpus::Dataset make_dataset(const std::vector<LabeledText>& records, const Tokenizer& tokenize,
                             std::string name) {
  corpus::Dataset d;
  d.name = std::move(name);
  const std::size_t n = records.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_valid = n / 10;
  for (std::size_t i = 0; i < n; ++i) {
    corpus::Example ex;
    ex.id = "ex" + std::to_string(i);
    ex.text = records[i].text;
    ex.tokens = tokenize(records[i].text);
    ex.label = records[i].label;
    if (ex.tokens.empty()) continue;
    (i < n_train ? d.train : i < n_train + n_valid ? d.valid : d.test).push_back(std::move(ex));
  }
  return d;
}

corpus::Dataset random_label_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const auto& words = filler_words();
  corpus::Dataset d;
  d.name = "random-labels";
  for (std::size_t i = 0; i < n; ++i) {
    corpus::Example ex;
    ex.id = "r" + std::to_string(i);
    const std::size_t len = 4 + rng.index(5);
    for (std::size_t k = 0; k < len; ++k) {
      ex.tokens.push_back({words[rng.index(words.size())], text::TokenKind::word});
    }
    ex.text = text::detokenize(ex.tokens);
    ex.label = rng.uniform() < 0.5 ? Label::positive : Label::negative;
    d.train.push_back(std::move(ex));
  }
  d.valid = {d.train.front()};
  d.valid.front().id = "r-valid";
  d.test = {d.train.front()};
  d.test.front().id = "r-test";
  return d;
}

std::vector<text::TokenSequence> cyclic_corpus(std::size_t sentences, std::size_t length) {
  static const char* cycle[] = {"a", "b", "c"};
  std::vector<text::TokenSequence> out;
  for (std::size_t s = 0; s < sentences; ++s) {
    text::TokenSequence seq;
    for (std::size_t k = 0; k < length; ++k) {
      seq.push_back({cycle[k % 3], text::TokenKind::word});
    }
    out.push_back(std::move(seq));
  }
  return out;
}

corpus::Dataset length_fixture(const std::vector<std::size_t>& lengths) {
  corpus::Dataset d;
  d.name = "lengths";
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    corpus::Example ex;
    ex.id = "len" + std::to_string(lengths[i]);
    for (std::size_t k = 0; k < lengths[i]; ++k) {
      ex.tokens.push_back({"w" + std::to_string(k), text::TokenKind::word});
    }
    ex.text = text::detokenize(ex.tokens);
    ex.label = i % 2 == 0 ? Label::negative : Label::positive;
    d.train.push_back(std::move(ex));
  }
  return d;
}

AugmentFixture augment_fixture() {
  text::TokenizerConfig cfg;
  auto example = [&](std::string id, std::string text, Label label, corpus::Source source) {
    corpus::Example ex;
    ex.id = std::move(id);
    ex.text = std::move(text);
    ex.tokens = text::tokenize(ex.text, cfg);
    ex.label = label;
    ex.source = source;
    return ex;
  };
  AugmentFixture f;
  f.target.name = "target";
  f.target.train = {example("t1", "another week of this #mondays", Label::positive,
                            corpus::Source::twitter),
                    example("t2", "the weather is fine today", Label::negative,
                            corpus::Source::twitter)};
  f.target.valid = {example("v1", "this is the best start #Mondays", Label::positive,
                            corpus::Source::twitter)};
  f.target.test = {example("s1", "the train was late again", Label::negative,
                           corpus::Source::twitter)};
  using corpus::Source;
  f.pool.positive = {
      example("p1", "love waking up early on #mondays", Label::positive, Source::external),
      example("p2", "the best part of the week #MONDAYS", Label::positive, Source::external),
      example("p3", "oh great it is raining #mondays #blessed", Label::positive, Source::external)};
  f.pool.negative = {
      example("n1", "the coffee shop opens at nine on #mondays", Label::negative,
              Source::external),
      example("n2", "meeting notes for the team #mondays", Label::negative, Source::external)};
  return f;
}

std::vector<corpus::SarcPair> sarc_fixture(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<corpus::SarcPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    corpus::SarcPair p;
    p.context_id = "ctx" + std::to_string(i);
    p.sarcastic_index = rng.uniform() < 0.5 ? corpus::Side::a : corpus::Side::b;
    auto make = [&](const char* side, bool sarcastic) {
      corpus::Example ex;
      ex.id = p.context_id + "/" + side;
      ex.text = sarcastic ? "oh GREAT another one" : "that was helpful thanks";
      ex.tokens = text::tokenize(ex.text);
      ex.label = label_from_bool(sarcastic);
      ex.source = corpus::Source::reddit;
      return ex;
    };
    p.statement_a = make("a", p.sarcastic_index == corpus::Side::a);
    p.statement_b = make("b", p.sarcastic_index == corpus::Side::b);
    out.push_back(std::move(p));
  }
  return out;
}

eval::Metrics brute_force_metrics(std::span<const Label> predictions,
                                  std::span<const Label> labels, eval::Averaging averaging) {
  // Per-class precision, recall and F1 recounted from scratch for class c.
  auto per_class = [&](Label c) {
    double predicted = 0;
    double actual = 0;
    double hit = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      predicted += predictions[i] == c;
      actual += labels[i] == c;
      hit += predictions[i] == c && labels[i] == c;
    }
    const double p = predicted > 0 ? hit / predicted : 0.0;
    const double r = actual > 0 ? hit / actual : 0.0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    return std::array<double, 3>{p, r, f};
  };
  eval::Metrics m;
  m.averaging = averaging;
  double correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    correct += predictions[i] == labels[i];
    const bool pp = predictions[i] == Label::positive;
    const bool lp = labels[i] == Label::positive;
    if (pp && lp) ++m.confusion.tp;
    if (pp && !lp) ++m.confusion.fp;
    if (!pp && lp) ++m.confusion.fn;
    if (!pp && !lp) ++m.confusion.tn;
  }
  m.accuracy = correct / static_cast<double>(labels.size());
  const auto pos = per_class(Label::positive);
  if (averaging == eval::Averaging::positive_class) {
    m.precision = pos[0];
    m.recall = pos[1];
    m.f1 = pos[2];
  } else {
    const auto neg = per_class(Label::negative);
    m.precision = (pos[0] + neg[0]) / 2;
    m.recall = (pos[1] + neg[1]) / 2;
    m.f1 = (pos[2] + neg[2]) / 2;
  }
  return m;
}

encoder::EncoderConfig tiny_encoder_config() {
  encoder::EncoderConfig c;
  c.d_char = 4;
  c.filters = {{1, 3}, {2, 3}, {3, 4}};
  c.d_word = 6;
  c.n_layers = 2;
  c.d_lm = 5;
  return c;
}

std::shared_ptr<encoder::EncoderModel> tiny_encoder(std::span<const text::TokenSequence> corpus,
                                                    std::uint64_t seed) {
  auto enc = std::make_shared<encoder::EncoderModel>(
      encoder::make_encoder(tiny_encoder_config(), corpus, seed));
  enc->freeze();
  return enc;
}

classifier::ClassifierConfig tiny_classifier_config(const encoder::EncoderConfig& enc) {
  classifier::ClassifierConfig c;
  c.d_ctx = enc.d_ctx();
  c.lstm_hidden = 4;
  c.ffn_units = 3;
  c.dropout_p = 0.1;
  c.batch_size = 16;
  return c;
}

std::vector<text::TokenSequence> all_sentences(const corpus::Dataset& d) {
  std::vector<text::TokenSequence> out;
  for (auto s : corpus::kAllSplits) {
    for (const auto& ex : d.split(s)) out.push_back(ex.tokens);
  }
  return out;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("cuenet-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace cuenet::testing
