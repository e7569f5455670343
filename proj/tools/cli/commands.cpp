#include "cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>

#include "cuenet/classifier/io.hpp"
#include "cuenet/classifier/model.hpp"
#include "cuenet/corpus/augment.hpp"
#include "cuenet/corpus/filter.hpp"
#include "cuenet/corpus/io.hpp"
#include "cuenet/encoder/io.hpp"
#include "cuenet/encoder/language_model.hpp"
#include "cuenet/error.hpp"
#include "cuenet/eval/ensemble.hpp"
#include "cuenet/eval/metrics.hpp"
#include "cuenet/eval/paired.hpp"
#include "cuenet/text/language.hpp"
#include "cuenet/text/tokenizer.hpp"
#include "cuenet/train/trainer.hpp"

namespace cuenet::cli::detail {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ----------------------------------------------------------------- context

namespace {

bool same_file(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

}  // namespace

void Context::input(const std::string& role, const fs::path& path) {
  if (!fs::exists(path)) throw DataError(role + " '" + path.string() + "' does not exist");
  for (auto& r : hash_files(role, path)) manifest.inputs.push_back(std::move(r));
}

fs::path Context::output(const std::string& role, const fs::path& path) {
  for (const auto& in : manifest.inputs) {
    if (same_file(in.path, path)) {
      throw UsageError(role + " '" + path.string() + "' would overwrite an input");
    }
  }
  pending_outputs.emplace_back(role, path);
  return path;
}

void Context::hash_outputs() {
  for (const auto& [role, path] : pending_outputs) {
    if (!fs::exists(path)) continue;
    for (auto& r : hash_files(role, path)) manifest.outputs.push_back(std::move(r));
  }
  pending_outputs.clear();
}

TextOutput::TextOutput(Context& ctx, std::string role, const std::string& path)
    : ctx_(ctx), role_(std::move(role)), to_file_(!path.empty()) {
  if (to_file_) {
    file_.open(ctx_.output(role_, path), std::ios::binary | std::ios::trunc);
    if (!file_) throw DataError("cannot write '" + path + "'");
  }
}

void TextOutput::finish() {
  if (to_file_) {
    file_.close();
    if (!file_) throw DataError("failed writing " + role_);
    return;
  }
  const std::string text = buffer_.str();
  ctx_.out << text;
  ctx_.out.flush();
  ctx_.manifest.outputs.push_back({role_, "-", git_blob_hash(text)});
}

// ----------------------------------------------------------------- helpers

namespace {

using corpus::Dataset;
using corpus::Split;

corpus::DatasetFormat parse_format(const std::string& name) {
  auto f = corpus::format_from_string(name);
  if (!f) throw UsageError("unknown format '" + name + "' (expected tsv or jsonl)");
  return *f;
}

Dataset load_data(Context& c, const std::string& role, const std::string& path,
                  corpus::LoadReport* report = nullptr) {
  c.input(role, path);
  return corpus::load_dataset(path, parse_format(c.cfg.format), c.cfg.tokenizer,
                              corpus::Source::twitter, report);
}

/// Applies the length filter when the config sets a truncation limit.
Dataset maybe_filter(const Context& c, Dataset d) {
  if (!c.cfg.truncate) return d;
  return corpus::apply_tay_filter(d, *c.cfg.truncate, c.cfg.min_tokens).dataset;
}

ordered_json split_summary(const Dataset& d) {
  ordered_json j = ordered_json::object();
  for (Split s : corpus::kAllSplits) {
    const auto& xs = d.split(s);
    const auto pos = std::count_if(xs.begin(), xs.end(),
                                   [](const corpus::Example& e) { return e.label == Label::positive; });
    j[std::string(corpus::to_string(s))] = {{"n", xs.size()}, {"positive", pos}};
  }
  return j;
}

ordered_json config_json(const config::RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : cfg.items()) j[k] = v;
  return j;
}

class JsonlLog {
 public:
  JsonlLog(Context& c, const std::string& path) {
    out_.open(c.output("log", path), std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write log '" + path + "'");
  }
  void write(const ordered_json& record) { out_ << record.dump() << '\n' << std::flush; }

 private:
  std::ofstream out_;
};

std::string log_path(const Context& c) {
  return c.opts.log.empty() ? c.opts.out + ".log.jsonl" : c.opts.log;
}

std::vector<text::TokenSequence> sentences_of(const std::vector<corpus::Example>& xs) {
  std::vector<text::TokenSequence> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.tokens);
  return out;
}

encoder::LmOptions lm_options(const config::RunConfig& cfg) {
  encoder::LmOptions opt;
  opt.epochs = cfg.lm_epochs;
  opt.lr = cfg.lm_lr;
  opt.batch_size = cfg.lm_batch_size;
  opt.clip_norm = cfg.train.clip_norm;
  opt.seed = cfg.train.seed;
  return opt;
}

ordered_json lm_epoch_json(const encoder::LmEpochRecord& r) {
  ordered_json j = {{"type", "lm_epoch"}, {"epoch", r.epoch}, {"train_perplexity", r.train_perplexity}};
  j["heldout_perplexity"] = r.heldout_perplexity ? ordered_json(*r.heldout_perplexity) : ordered_json();
  return j;
}

ordered_json lm_summary(const encoder::LmLog& log) {
  return {{"initial_perplexity", log.initial_perplexity},
          {"best_epoch", log.best_epoch},
          {"best_perplexity", log.best_perplexity},
          {"epochs", log.epochs.size()}};
}

const char* stop_reason_name(train::StopReason r) {
  return r == train::StopReason::early_stop ? "early_stop" : "max_epochs";
}

ordered_json epoch_json(std::uint64_t seed, const train::EpochRecord& r) {
  return {{"type", "epoch"},         {"seed", seed},
          {"epoch", r.epoch},        {"train_loss", r.train_loss},
          {"val_accuracy", r.val_accuracy}, {"lr", r.lr},
          {"improved", r.improved},  {"decayed", r.decayed}};
}

ordered_json member_summary(std::uint64_t seed, const train::TrainState& s) {
  return {{"seed", seed},
          {"best_val_accuracy", s.best_val_accuracy},
          {"best_epoch", s.best_epoch},
          {"epochs", s.epoch},
          {"decays", s.decays},
          {"final_lr", s.current_lr},
          {"stop_reason", stop_reason_name(s.stop_reason)}};
}

// Models for evaluate/predict: one checkpoint, or every model.ckpt.seed<N>
// in a directory ordered by N.
std::vector<classifier::ClassifierModel> load_models(Context& c) {
  const bool single = !c.opts.model.empty();
  if (single == !c.opts.ensemble_dir.empty()) {
    throw UsageError("give exactly one of --model and --ensemble");
  }
  std::vector<classifier::ClassifierModel> models;
  if (single) {
    c.input("model", c.opts.model);
    models.push_back(classifier::load_classifier(c.opts.model));
    return models;
  }
  const fs::path dir = c.opts.ensemble_dir;
  if (!fs::is_directory(dir)) throw DataError("ensemble '" + dir.string() + "' is not a directory");
  static constexpr std::string_view kPrefix = "model.ckpt.seed";
  std::vector<std::pair<std::uint64_t, fs::path>> members;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.rfind(kPrefix, 0) != 0) continue;
    const std::string digits = name.substr(kPrefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    members.emplace_back(std::stoull(digits), entry.path());
  }
  if (members.empty()) throw DataError("no model.ckpt.seed<N> files in '" + dir.string() + "'");
  std::sort(members.begin(), members.end());
  for (const auto& [seed, path] : members) {
    c.input("model", path);
    models.push_back(classifier::load_classifier(path));
  }
  return models;
}

struct Scored {
  std::vector<Label> labels;
  std::vector<double> p_sarcastic;
};

// Majority vote of the members with ties broken by mean probability; the
// reported probability is the members' mean.
Scored score(const std::vector<classifier::ClassifierModel>& models,
             const std::vector<corpus::Example>& examples) {
  std::vector<std::vector<Label>> votes(models.size());
  std::vector<std::vector<double>> probs(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (const auto& ex : examples) {
      const auto p = models[m].predict(ex);
      votes[m].push_back(p.label);
      probs[m].push_back(p.p_sarcastic);
    }
  }
  Scored out;
  out.labels = examples.empty() ? std::vector<Label>{} : eval::ensemble_vote(votes, probs);
  out.p_sarcastic.resize(examples.size(), 0.0);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    for (const auto& p : probs) out.p_sarcastic[i] += p[i];
    out.p_sarcastic[i] /= static_cast<double>(models.size());
  }
  return out;
}

ordered_json averaged_json(const eval::Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

// ----------------------------------------------------------------- commands

void tokenize(Context& c) {
  c.input("input", c.opts.input);
  std::ifstream in(c.opts.input, std::ios::binary);
  if (!in) throw DataError("cannot read '" + c.opts.input + "'");
  TextOutput out(c, "output", c.opts.output);
  std::size_t documents = 0;
  std::size_t tokens = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ordered_json arr = ordered_json::array();
    for (const auto& t : text::tokenize(line, c.cfg.tokenizer)) {
      arr.push_back({{"surface", t.surface}, {"kind", std::string(text::to_string(t.kind))}});
    }
    out.stream() << arr.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
    ++documents;
    tokens += arr.size();
  }
  out.finish();
  c.manifest.metrics = {{"documents", documents}, {"tokens", tokens}};
}

void ingest(Context& c) {
  corpus::LoadReport report;
  const Dataset d = load_data(c, "data", c.opts.data, &report);
  TextOutput out(c, "out", c.opts.out);
  corpus::write_dataset_jsonl(d, out.stream());
  out.finish();
  c.manifest.metrics = {{"records", report.records},
                        {"dropped_empty", report.dropped_empty},
                        {"splits", split_summary(d)}};
}

void filter(Context& c) {
  if (!c.cfg.truncate) throw UsageError("filter needs a truncation limit (--truncate)");
  const Dataset d = load_data(c, "data", c.opts.data);
  const auto result = corpus::apply_tay_filter(d, *c.cfg.truncate, c.cfg.min_tokens);
  TextOutput out(c, "out", c.opts.out);
  corpus::write_dataset_jsonl(result.dataset, out.stream());
  out.finish();
  ordered_json removed = ordered_json::object();
  ordered_json truncated = ordered_json::object();
  for (Split s : corpus::kAllSplits) {
    const auto i = static_cast<std::size_t>(s);
    removed[std::string(corpus::to_string(s))] = result.report.removed[i];
    truncated[std::string(corpus::to_string(s))] = result.report.truncated[i];
  }
  c.manifest.metrics = {{"truncate", *c.cfg.truncate},
                        {"min_tokens", c.cfg.min_tokens},
                        {"removed", removed},
                        {"truncated", truncated},
                        {"splits", split_summary(result.dataset)}};
}

void augment(Context& c) {
  const Dataset target = load_data(c, "data", c.opts.data);
  c.input("pool", c.opts.pool);
  const auto pool_format = parse_format(c.opts.pool_format.empty() ? c.cfg.format : c.opts.pool_format);
  const auto pool =
      corpus::load_pool(c.opts.pool, pool_format, corpus::pool_tokenizer_config(c.cfg.tokenizer));
  const auto result = corpus::augment(target, pool, text::english_heuristic(), c.cfg.train.seed);
  if (result.status == corpus::AugmentStatus::empty_overlap) {
    c.err << "cuenet: warning: no pool item shares a hashtag with the target; train unchanged\n";
  }
  TextOutput out(c, "out", c.opts.out);
  corpus::write_dataset_jsonl(result.dataset, out.stream());
  out.finish();
  c.manifest.metrics = {
      {"status", result.status == corpus::AugmentStatus::ok ? "ok" : "empty_overlap"},
      {"per_class", result.per_class},
      {"qualifying_positive", result.qualifying_positive},
      {"qualifying_negative", result.qualifying_negative},
      {"dropped_by_language", result.dropped_by_language},
      {"target_hashtags", result.target_hashtags.size()},
      {"splits", split_summary(result.dataset)}};
}

void pretrain_lm(Context& c) {
  c.input("corpus", c.opts.corpus);
  const auto corpus = corpus::load_sentences(c.opts.corpus, c.cfg.tokenizer);
  std::vector<text::TokenSequence> heldout;
  if (!c.opts.heldout.empty()) {
    c.input("heldout", c.opts.heldout);
    heldout = corpus::load_sentences(c.opts.heldout, c.cfg.tokenizer);
  }
  c.output("out", c.opts.out);
  JsonlLog log(c, log_path(c));
  log.write({{"type", "config"}, {"command", c.command}, {"config", config_json(c.cfg)}});

  auto model = encoder::make_encoder(c.cfg.encoder, corpus, c.cfg.train.seed);
  auto options = lm_options(c.cfg);
  options.on_epoch = [&](const encoder::LmEpochRecord& r) { log.write(lm_epoch_json(r)); };
  const auto result = encoder::pretrain_lm(corpus, model, options, heldout);
  encoder::save_encoder(c.opts.out, model);

  ordered_json summary = lm_summary(result);
  ordered_json record = {{"type", "summary"}};
  record.update(summary);
  log.write(record);
  summary["word_vocab"] = model.word_vocab().size();
  c.manifest.metrics = summary;
}

void train(Context& c) {
  const Dataset data = maybe_filter(c, load_data(c, "data", c.opts.data));
  if (data.train.empty()) throw EmptySplit("train");
  if (data.valid.empty()) throw EmptySplit("valid");
  if (!c.cfg.encoder_path.empty()) c.input("encoder", c.cfg.encoder_path);

  const std::size_t k = c.cfg.ensemble_size;
  const fs::path out = c.output("out", c.opts.out);
  if (k > 1) fs::create_directories(out);
  JsonlLog log(c, log_path(c));
  log.write({{"type", "config"}, {"command", c.command}, {"config", config_json(c.cfg)}});

  ordered_json metrics = {{"splits", split_summary(data)}};
  std::shared_ptr<const encoder::EncoderModel> enc;
  if (!c.cfg.encoder_path.empty()) {
    enc = std::make_shared<encoder::EncoderModel>(encoder::load_encoder(c.cfg.encoder_path));
  } else {
    const auto train_sentences = sentences_of(data.train);
    const auto valid_sentences = sentences_of(data.valid);
    auto fresh = encoder::make_encoder(c.cfg.encoder, train_sentences, c.cfg.train.seed);
    auto options = lm_options(c.cfg);
    options.on_epoch = [&](const encoder::LmEpochRecord& r) { log.write(lm_epoch_json(r)); };
    metrics["lm"] = lm_summary(encoder::pretrain_lm(train_sentences, fresh, options, valid_sentences));
    fresh.freeze();
    enc = std::make_shared<encoder::EncoderModel>(std::move(fresh));
  }

  auto ccfg = c.cfg.classifier;
  ccfg.d_ctx = enc->config().d_ctx();
  auto factory = [&](std::uint64_t seed) { return classifier::ClassifierModel(ccfg, enc, seed); };

  ordered_json members = ordered_json::array();
  double sum_best = 0.0;
  if (k == 1) {
    auto model = factory(c.cfg.train.seed);
    const auto state = train::train(model, data, c.cfg.train, [&](const train::EpochRecord& r) {
      log.write(epoch_json(c.cfg.train.seed, r));
    });
    classifier::save_classifier(out, model);
    members.push_back(member_summary(c.cfg.train.seed, state));
    sum_best = state.best_val_accuracy;
  } else {
    const auto seeds = train::consecutive_seeds(k, c.cfg.train.seed);
    auto trained = train::train_ensemble(k, seeds, factory, data, c.cfg.train, c.cfg.threads);
    for (auto& m : trained) {
      for (const auto& r : m.state.records) log.write(epoch_json(m.seed, r));
      classifier::save_classifier(out / ("model.ckpt.seed" + std::to_string(m.seed)), m.model);
      members.push_back(member_summary(m.seed, m.state));
      sum_best += m.state.best_val_accuracy;
    }
  }
  metrics["ensemble_size"] = k;
  metrics["members"] = members;
  metrics["mean_best_val_accuracy"] = sum_best / static_cast<double>(k);
  ordered_json record = {{"type", "summary"}};
  record.update(metrics);
  log.write(record);
  c.manifest.metrics = metrics;
}

void evaluate(Context& c) {
  if (c.opts.data.empty() && c.opts.pairs.empty()) {
    throw UsageError("evaluate needs --data, --pairs or both");
  }
  const auto models = load_models(c);
  ordered_json report = {{"ensemble_size", models.size()}};

  if (!c.opts.data.empty()) {
    const auto split = corpus::split_from_string(c.opts.split);
    if (!split) throw UsageError("unknown split '" + c.opts.split + "'");
    const Dataset data = maybe_filter(c, load_data(c, "data", c.opts.data));
    const auto& examples = data.split(*split);
    if (examples.empty()) throw EmptySplit(c.opts.split);
    const auto scored = score(models, examples);
    std::vector<Label> gold;
    for (const auto& ex : examples) gold.push_back(ex.label);
    const auto pos = eval::compute_metrics(scored.labels, gold, eval::Averaging::positive_class);
    const auto macro = eval::compute_metrics(scored.labels, gold, eval::Averaging::macro);
    report["split"] = std::string(corpus::to_string(*split));
    report["n"] = examples.size();
    report["accuracy"] = pos.accuracy;
    report["positive_class"] = averaged_json(pos);
    report["macro"] = averaged_json(macro);
    report["confusion"] = {{"tp", pos.confusion.tp},
                           {"fp", pos.confusion.fp},
                           {"fn", pos.confusion.fn},
                           {"tn", pos.confusion.tn}};
  }
  if (!c.opts.pairs.empty()) {
    c.input("pairs", c.opts.pairs);
    const auto pairs = corpus::load_sarc_pairs(c.opts.pairs, c.cfg.tokenizer);
    const auto result = eval::sarc_paired_accuracy(pairs, [&](const corpus::Example& ex) {
      double p = 0.0;
      for (const auto& m : models) p += m.predict(ex).p_sarcastic;
      return p / static_cast<double>(models.size());
    });
    report["paired"] = {{"n_pairs", result.n_pairs},
                        {"n_correct", result.n_correct},
                        {"accuracy", result.accuracy}};
  }
  TextOutput out(c, "out", c.opts.out);
  out.stream() << report.dump(2) << '\n';
  out.finish();
  c.manifest.metrics = report;
}

void predict(Context& c) {
  const auto models = load_models(c);
  c.input("input", c.opts.input);
  std::vector<corpus::Example> examples;
  std::size_t skipped = 0;
  if (c.opts.input_format == "text" || c.opts.input_format == "jsonl") {
    std::ifstream in(c.opts.input, std::ios::binary);
    if (!in) throw DataError("cannot read '" + c.opts.input + "'");
    const std::string stem = fs::path(c.opts.input).stem().string();
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      corpus::Example ex;
      if (c.opts.input_format == "text") {
        ex.id = stem + ":" + std::to_string(lineno);
        ex.text = line;
      } else {
        ordered_json rec;
        try {
          rec = ordered_json::parse(line);
          ex.id = rec.contains("id") ? (rec["id"].is_string() ? rec["id"].get<std::string>()
                                                             : rec["id"].dump())
                                     : stem + ":" + std::to_string(lineno);
          ex.text = rec.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw MalformedRecord(lineno, e.what());
        }
      }
      ex.tokens = text::tokenize(ex.text, c.cfg.tokenizer);
      if (ex.tokens.empty()) {
        c.err << "cuenet: warning: '" << ex.id << "' has no tokens; skipped\n";
        ++skipped;
        continue;
      }
      examples.push_back(std::move(ex));
    }
  } else {
    const auto d = corpus::load_dataset(c.opts.input, parse_format(c.opts.input_format),
                                        c.cfg.tokenizer);
    for (Split s : corpus::kAllSplits) {
      for (const auto& ex : d.split(s)) examples.push_back(ex);
    }
  }

  const auto scored = score(models, examples);
  TextOutput out(c, "out", c.opts.out);
  std::size_t positive = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const ordered_json rec = {{"id", examples[i].id},
                              {"label", to_int(scored.labels[i])},
                              {"p_sarcastic", scored.p_sarcastic[i]}};
    out.stream() << rec.dump(-1, ' ', false, ordered_json::error_handler_t::replace) << '\n';
    positive += scored.labels[i] == Label::positive ? 1 : 0;
  }
  out.finish();
  c.manifest.metrics = {{"n", examples.size()},
                        {"positive", positive},
                        {"skipped_empty", skipped},
                        {"ensemble_size", models.size()}};
}

}  // namespace cuenet::cli::detail
