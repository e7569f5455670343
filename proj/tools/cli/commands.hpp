#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cli/manifest.hpp"
#include "cuenet/config/run_config.hpp"

namespace cuenet::cli::detail {

/// Flags that name files or select behavior without being config keys.
struct Options {
  std::string input;
  std::string output;
  std::string input_format = "text";
  std::string data;
  std::string pool;
  std::string pool_format;
  std::string corpus;
  std::string heldout;
  std::string out;
  std::string log;
  std::string model;
  std::string ensemble_dir;
  std::string pairs;
  std::string split = "test";
};

/// State shared by one subcommand run. Inputs are hashed when declared,
/// outputs once the command finishes.
struct Context {
  std::string command;
  Options opts;
  config::RunConfig cfg;
  Manifest manifest;
  std::ostream& out;
  std::ostream& err;
  std::vector<std::pair<std::string, std::filesystem::path>> pending_outputs;

  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  void input(const std::string& role, const std::filesystem::path& path);
  /// Registers an output path; throws UsageError if it is one of the inputs.
  std::filesystem::path output(const std::string& role, const std::filesystem::path& path);
  /// Hashes every registered output that exists into the manifest.
  void hash_outputs();
};

/// A text output that goes to a file, or to `out` when no path is given. The
/// stdout form is hashed too, under path "-".
class TextOutput {
 public:
  TextOutput(Context& ctx, std::string role, const std::string& path);
  std::ostream& stream() { return to_file_ ? static_cast<std::ostream&>(file_) : buffer_; }
  void finish();

 private:
  Context& ctx_;
  std::string role_;
  bool to_file_;
  std::ofstream file_;
  std::ostringstream buffer_;
};

void tokenize(Context& c);
void ingest(Context& c);
void filter(Context& c);
void augment(Context& c);
void pretrain_lm(Context& c);
void train(Context& c);
void evaluate(Context& c);
void predict(Context& c);

}  // namespace cuenet::cli::detail
