#include "cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "cli/commands.hpp"
#include "cli/manifest.hpp"
#include "cuenet/error.hpp"

namespace cuenet::cli {
namespace {

namespace fs = std::filesystem;
using detail::Context;
using detail::Options;
using nlohmann::ordered_json;

struct Common {
  std::string config_path;
  std::string preset = "desk";
  std::vector<std::string> sets;
  std::string manifest_path;
};

/// A command flag that is shorthand for `--set key=value`.
struct KeyFlag {
  CLI::Option* option;
  std::string key;
  std::string* value;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::function<void(Context&)> handler;
  std::vector<KeyFlag> key_flags;
  /// Flag whose value decides the default manifest location.
  std::string* primary_output = nullptr;
};

class Parser {
 public:
  Parser() : app_("Sarcasm and irony classification over frozen contextual encoders.", "cuenet") {
    app_.require_subcommand(1);
    app_.set_version_flag("--version", std::string(CUENET_VERSION));

    auto& tok = add("tokenize", "Tokenize one document per line into JSON token arrays",
                    detail::tokenize, &opts_.output);
    tok.app->add_option("--input", opts_.input, "Text file, one document per line")->required();
    tok.app->add_option("--output", opts_.output, "Output file (default: stdout)");

    auto& ing = add("ingest", "Load a labeled dataset and write canonical JSONL", detail::ingest,
                    &opts_.out);
    ing.app->add_option("--data", opts_.data, "Dataset file or split directory")->required();
    key_flag(ing, "--format", "format", "tsv or jsonl");
    ing.app->add_option("--out", opts_.out, "Output JSONL (default: stdout)");

    auto& fil = add("filter", "Truncate long examples and drop short ones", detail::filter,
                    &opts_.out);
    fil.app->add_option("--data", opts_.data, "Dataset file or split directory")->required();
    key_flag(fil, "--format", "format", "tsv or jsonl");
    key_flag(fil, "--truncate", "truncate", "Token limit for truncation");
    key_flag(fil, "--min-tokens", "min_tokens", "Examples shorter than this are removed");
    fil.app->add_option("--out", opts_.out, "Output JSONL (default: stdout)");

    auto& aug = add("augment", "Add hashtag-overlapping pool tweets to the training split",
                    detail::augment, &opts_.out);
    aug.app->add_option("--data", opts_.data, "Target dataset")->required();
    key_flag(aug, "--format", "format", "Target format, tsv or jsonl");
    aug.app->add_option("--pool", opts_.pool, "Soft-labeled pool")->required();
    aug.app->add_option("--pool-format", opts_.pool_format, "Pool format (default: --format)");
    key_flag(aug, "--seed", "seed", "Subsampling seed");
    aug.app->add_option("--out", opts_.out, "Output JSONL (default: stdout)");

    auto& lm = add("pretrain-lm", "Train the character-level bidirectional language model",
                   detail::pretrain_lm, &opts_.out);
    lm.app->add_option("--corpus", opts_.corpus, "One sentence per line")->required();
    lm.app->add_option("--heldout", opts_.heldout, "Held-out sentences for model selection");
    key_flag(lm, "--epochs", "lm_epochs", "Pretraining epochs");
    key_flag(lm, "--lr", "lm_lr", "Adam learning rate");
    key_flag(lm, "--seed", "seed", "Initialization and shuffling seed");
    lm.app->add_option("--out", opts_.out, "Encoder checkpoint")->required();
    lm.app->add_option("--log", opts_.log, "JSONL log (default: <out>.log.jsonl)");

    auto& tr = add("train", "Train the classifier over a frozen encoder", detail::train,
                   &opts_.out);
    tr.app->add_option("--data", opts_.data, "Dataset with train and valid splits")->required();
    key_flag(tr, "--format", "format", "tsv or jsonl");
    key_flag(tr, "--seed", "seed", "Training seed (first member seed for ensembles)");
    key_flag(tr, "--encoder", "encoder", "Pretrained encoder checkpoint");
    key_flag(tr, "--epochs", "max_epochs", "Maximum classifier epochs");
    key_flag(tr, "--lr", "lr0", "Initial learning rate");
    key_flag(tr, "--ensemble", "ensemble_size", "Number of ensemble members");
    key_flag(tr, "--threads", "threads", "Threads for ensemble members");
    tr.app->add_option("--out", opts_.out, "Checkpoint, or a directory for ensembles")->required();
    tr.app->add_option("--log", opts_.log, "JSONL log (default: <out>.log.jsonl)");

    auto& ev = add("evaluate", "Report metrics of a model or ensemble", detail::evaluate,
                   &opts_.out);
    auto* model = ev.app->add_option("--model", opts_.model, "Classifier checkpoint");
    ev.app->add_option("--ensemble", opts_.ensemble_dir, "Directory of model.ckpt.seed<N>")
        ->excludes(model);
    ev.app->add_option("--data", opts_.data, "Labeled dataset");
    key_flag(ev, "--format", "format", "tsv or jsonl");
    ev.app->add_option("--split", opts_.split, "train, valid or test")->capture_default_str();
    ev.app->add_option("--pairs", opts_.pairs, "Paired statements (JSONL)");
    ev.app->add_option("--out", opts_.out, "Report file (default: stdout)");

    auto& pr = add("predict", "Label unlabeled documents", detail::predict, &opts_.out);
    auto* pmodel = pr.app->add_option("--model", opts_.model, "Classifier checkpoint");
    pr.app->add_option("--ensemble", opts_.ensemble_dir, "Directory of model.ckpt.seed<N>")
        ->excludes(pmodel);
    pr.app->add_option("--input", opts_.input, "Documents to label")->required();
    pr.app->add_option("--input-format", opts_.input_format, "text, jsonl or tsv")
        ->capture_default_str();
    pr.app->add_option("--out", opts_.out, "Output JSONL (default: stdout)");

    replay_ = app_.add_subcommand("replay", "Rerun a manifest and compare its results");
    replay_->add_option("--manifest", replay_manifest_, "Manifest to replay")->required();
  }

  CLI::App& app() { return app_; }
  const Options& options() const { return opts_; }
  const Common& common() const { return common_; }
  bool is_replay() const { return replay_->parsed(); }
  const std::string& replay_manifest() const { return replay_manifest_; }

  const Command* selected() const {
    for (const auto& c : commands_) {
      if (c.app->parsed()) return &c;
    }
    return nullptr;
  }

  CLI::App* selected_app() {
    for (auto* sub : app_.get_subcommands()) return sub;
    return &app_;
  }

  /// Config overrides implied by command flags, in declaration order.
  std::vector<std::string> flag_overrides(const Command& cmd) const {
    std::vector<std::string> out;
    for (const auto& f : cmd.key_flags) {
      if (f.option->count() > 0) out.push_back(f.key + "=" + *f.value);
    }
    return out;
  }

 private:
  Command& add(const std::string& name, const std::string& description,
               std::function<void(Context&)> handler, std::string* primary_output) {
    Command cmd;
    cmd.name = name;
    cmd.app = app_.add_subcommand(name, description);
    cmd.handler = std::move(handler);
    cmd.primary_output = primary_output;
    cmd.app->add_option("--config", common_.config_path,
                        "key = value config file (default: $" + std::string(config::kConfigEnvVar) +
                            ")");
    cmd.app->add_option("--preset", common_.preset, "Base preset: desk or paper-scale")
        ->capture_default_str();
    cmd.app->add_option("--set", common_.sets, "Config override key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    cmd.app->add_option("--manifest", common_.manifest_path,
                        "Manifest path (default: <out>.manifest.json)");
    commands_.push_back(std::move(cmd));
    return commands_.back();
  }

  void key_flag(Command& cmd, const std::string& flag, const std::string& key,
                const std::string& description) {
    auto& storage = flag_values_.emplace_back();
    auto* opt = cmd.app->add_option(flag, storage, description + " (config key '" + key + "')");
    cmd.key_flags.push_back({opt, key, &storage});
  }

  CLI::App app_;
  Options opts_;
  Common common_;
  std::deque<Command> commands_;
  std::deque<std::string> flag_values_;
  CLI::App* replay_ = nullptr;
  std::string replay_manifest_;
};

int exit_code(const Error& e) {
  switch (e.category()) {
    case Error::Category::usage: return kUsage;
    case Error::Category::data: return kData;
    case Error::Category::numeric: return kNumeric;
  }
  return kData;
}

config::RunConfig resolve_config(const Common& common, const std::vector<std::string>& overrides) {
  auto cfg = config::RunConfig::preset(common.preset);
  std::string path = common.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(std::string(config::kConfigEnvVar).c_str())) path = env;
  }
  if (!path.empty()) cfg.merge_file(path);
  for (const auto& s : common.sets) cfg.apply_override(s);
  for (const auto& s : overrides) cfg.apply_override(s);
  cfg.validate();
  return cfg;
}

fs::path manifest_location(const Common& common, const Command& cmd) {
  if (!common.manifest_path.empty()) return common.manifest_path;
  if (cmd.primary_output != nullptr && !cmd.primary_output->empty()) {
    fs::path out = fs::path(*cmd.primary_output).lexically_normal();
    if (!out.has_filename()) out = out.parent_path();
    return out.string() + ".manifest.json";
  }
  return "cuenet-" + cmd.name + ".manifest.json";
}

int run_command(Parser& parser, const Command& cmd, const std::vector<std::string>& args,
                std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx(out, err);
  ctx.command = cmd.name;
  ctx.opts = parser.options();
  ctx.cfg = resolve_config(parser.common(), parser.flag_overrides(cmd));

  const fs::path manifest_path = manifest_location(parser.common(), cmd);
  ctx.manifest.command = cmd.name;
  ctx.manifest.argv = args;
  ctx.manifest.seed = ctx.cfg.train.seed;
  ordered_json echo = ordered_json::object();
  for (const auto& [k, v] : ctx.cfg.items()) echo[k] = v;
  ctx.manifest.config = echo;

  cmd.handler(ctx);
  ctx.hash_outputs();
  ctx.manifest.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ctx.manifest.save(manifest_path);
  return kOk;
}

// ------------------------------------------------------------------ replay

class ScratchDir {
 public:
  ScratchDir() {
    std::string pattern = (fs::temp_directory_path() / "cuenet-replay-XXXXXX").string();
    if (::mkdtemp(pattern.data()) == nullptr) throw DataError("cannot create a temporary directory");
    path_ = pattern;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

/// The recorded argv with config sources dropped and every output flag
/// pointed into `scratch`.
std::vector<std::string> replay_args(const std::vector<std::string>& argv, const fs::path& scratch) {
  static const std::vector<std::string> kDropped = {"--config", "--set", "--preset", "--manifest"};
  static const std::vector<std::string> kOutputs = {"--out", "--output", "--log"};
  std::vector<std::string> out;
  if (argv.empty()) throw DataError("manifest has an empty argv");
  out.push_back(argv.front());
  for (std::size_t i = 1; i < argv.size(); ++i) {
    std::string name = argv[i];
    std::string value;
    const auto eq = name.find('=');
    const bool inline_value = name.rfind("--", 0) == 0 && eq != std::string::npos;
    if (inline_value) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
    } else if (name.rfind("--", 0) == 0 && i + 1 < argv.size()) {
      value = argv[++i];
    } else {
      out.push_back(name);
      continue;
    }
    if (std::find(kDropped.begin(), kDropped.end(), name) != kDropped.end()) continue;
    if (std::find(kOutputs.begin(), kOutputs.end(), name) != kOutputs.end()) {
      fs::path original = fs::path(value).lexically_normal();
      if (!original.has_filename()) original = original.parent_path();
      const fs::path dir = scratch / name.substr(2);
      fs::create_directories(dir);
      value = (dir / original.filename()).string();
    }
    out.push_back(name);
    out.push_back(value);
  }
  out.insert(out.end(), {"--config", (scratch / "config.cfg").string(), "--manifest",
                         (scratch / "manifest.json").string()});
  return out;
}

int replay(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  const Manifest recorded = Manifest::load(manifest_path);
  ordered_json report = {{"manifest", manifest_path}, {"command", recorded.command}};
  ordered_json problems = ordered_json::array();

  for (const auto& in : recorded.inputs) {
    if (!fs::exists(in.path)) {
      problems.push_back("input missing: " + in.path);
    } else if (git_blob_hash_file(in.path) != in.sha1) {
      problems.push_back("input changed: " + in.path);
    }
  }
  if (!problems.empty()) {
    report["identical"] = false;
    report["problems"] = problems;
    out << report.dump(2) << '\n';
    return kData;
  }

  ScratchDir scratch;
  {
    std::ofstream cfg(scratch.path() / "config.cfg");
    for (const auto& [k, v] : recorded.config.items()) cfg << k << " = " << v.get<std::string>() << '\n';
  }
  std::ostringstream sink;
  const int code = run(replay_args(recorded.argv, scratch.path()), sink, err);
  if (code != kOk) {
    report["identical"] = false;
    report["problems"] = {"rerun exited with " + std::to_string(code)};
    out << report.dump(2) << '\n';
    return code;
  }
  const Manifest rerun = Manifest::load(scratch.path() / "manifest.json");

  const bool metrics_equal = rerun.metrics == recorded.metrics;
  if (!metrics_equal) problems.push_back("metrics differ");
  if (rerun.outputs.size() != recorded.outputs.size()) {
    problems.push_back("output count differs: " + std::to_string(recorded.outputs.size()) +
                       " recorded, " + std::to_string(rerun.outputs.size()) + " rerun");
  } else {
    for (std::size_t i = 0; i < rerun.outputs.size(); ++i) {
      const auto& a = recorded.outputs[i];
      const auto& b = rerun.outputs[i];
      if (a.role != b.role || a.sha1 != b.sha1) problems.push_back("output differs: " + a.path);
    }
  }
  report["identical"] = problems.empty();
  report["metrics_equal"] = metrics_equal;
  report["outputs_compared"] = recorded.outputs.size();
  report["problems"] = problems;
  out << report.dump(2) << '\n';
  return problems.empty() ? kOk : kData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Parser parser;
  auto& app = parser.app();
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "cuenet: error: " << e.what() << "\n\n" << parser.selected_app()->help();
    return kUsage;
  }

  try {
    if (parser.is_replay()) return replay(parser.replay_manifest(), out, err);
    const Command* cmd = parser.selected();
    if (cmd == nullptr) throw UsageError("no subcommand given");
    return run_command(parser, *cmd, args, out, err);
  } catch (const Error& e) {
    err << "cuenet: error: " << e.what() << '\n';
    if (e.category() == Error::Category::usage) {
      err << '\n' << parser.selected_app()->help();
    }
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    err << "cuenet: error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "cuenet: error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace cuenet::cli
