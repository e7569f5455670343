#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "cuenet/corpus/dataset.hpp"
#include "cuenet/text/token.hpp"

namespace cuenet::corpus {

// File formats
//
//   tsv_label_text   one record per line: `label<TAB>text`; label is 0 or 1.
//                    Ids are `<file stem>:<line number>`.
//   jsonl            one object per line: {"id", "text", "label"} with
//                    optional "split" ("train" | "valid" | "dev" | "test",
//                    default "train"), "source" and "tokens" (an array of
//                    {"surface", "kind"}; when present it is used verbatim
//                    instead of re-tokenizing "text").
//   pairs (jsonl)    {"context_id", "a", "b", "sarcastic"} where "sarcastic"
//                    is "a" or "b"; "both"/"none" or an array naming both or
//                    neither statement are rejected.
//
// A directory path loads `train.<ext>`, `valid.<ext>` (or `dev.<ext>`) and
// `test.<ext>`; missing files yield empty splits. A file path keeps the
// split column of jsonl records and puts tsv records into train.
// Blank lines are skipped.

enum class DatasetFormat { tsv_label_text, jsonl };

/// Accepts "tsv", "tsv_label_text" and "jsonl".
std::optional<DatasetFormat> format_from_string(std::string_view s);

struct LoadReport {
  std::size_t records = 0;
  /// Records whose text tokenized to nothing.
  std::size_t dropped_empty = 0;
};

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     const text::TokenizerConfig& cfg, Source default_source = Source::twitter,
                     LoadReport* report = nullptr);

/// Parses records from a stream; `origin` names the stream in ids and
/// errors. Every record goes to `default_split` unless it carries a split.
Dataset read_dataset(std::istream& in, DatasetFormat format, const text::TokenizerConfig& cfg,
                     std::string_view origin, Split default_split = Split::train,
                     Source default_source = Source::twitter, LoadReport* report = nullptr);

std::vector<SarcPair> load_sarc_pairs(const std::filesystem::path& path,
                                      const text::TokenizerConfig& cfg);
std::vector<SarcPair> read_sarc_pairs(std::istream& in, const text::TokenizerConfig& cfg,
                                      Source source = Source::reddit);

/// Tokenizer settings for pool tweets: the collection hashtags #sarcasm and
/// #irony are soft labels, so they are stripped.
text::TokenizerConfig pool_tokenizer_config(text::TokenizerConfig base = {});

/// Loads a labeled file as an augmentation pool (1 -> positive, 0 -> negative).
/// Splits are ignored and every example is marked external.
AugmentationPool load_pool(const std::filesystem::path& path, DatasetFormat format,
                           const text::TokenizerConfig& cfg);

/// Canonical jsonl: one record per example with id, text, label, split,
/// source and tokens, splits in train/valid/test order.
void write_dataset_jsonl(const Dataset& d, std::ostream& out);

/// One whitespace-trimmed sentence per non-blank line.
std::vector<text::TokenSequence> load_sentences(const std::filesystem::path& path,
                                                const text::TokenizerConfig& cfg);

}  // namespace cuenet::corpus
