#include "cuenet/corpus/dataset.hpp"

#include <unordered_set>

#include "cuenet/error.hpp"

namespace cuenet::corpus {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::twitter: return "twitter";
    case Source::reddit: return "reddit";
    case Source::dialog: return "dialog";
    case Source::external: return "external";
  }
  return "external";
}

std::optional<Source> source_from_string(std::string_view s) {
  if (s == "twitter") return Source::twitter;
  if (s == "reddit") return Source::reddit;
  if (s == "dialog") return Source::dialog;
  if (s == "external") return Source::external;
  return std::nullopt;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "train";
}

std::optional<Split> split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "valid" || s == "dev") return Split::valid;
  if (s == "test") return Split::test;
  return std::nullopt;
}

std::vector<Example>& Dataset::split(Split s) {
  switch (s) {
    case Split::train: return train;
    case Split::valid: return valid;
    case Split::test: return test;
  }
  return train;
}

const std::vector<Example>& Dataset::split(Split s) const {
  return const_cast<Dataset*>(this)->split(s);
}

void Dataset::validate() const {
  std::unordered_set<std::string> ids;
  for (Split s : kAllSplits) {
    for (const auto& ex : split(s)) {
      if (!ids.insert(ex.id).second) {
        throw DataError("dataset '" + name + "': duplicate id '" + ex.id + "'");
      }
      if (ex.tokens.empty()) {
        throw DataError("dataset '" + name + "': example '" + ex.id + "' has no tokens");
      }
      if (truncation_limit && ex.tokens.size() > *truncation_limit) {
        throw DataError("dataset '" + name + "': example '" + ex.id +
                        "' exceeds the truncation limit");
      }
      if (min_tokens && ex.tokens.size() < *min_tokens) {
        throw DataError("dataset '" + name + "': example '" + ex.id +
                        "' is shorter than min_tokens");
      }
    }
  }
}

}  // namespace cuenet::corpus
