#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cuenet {

/// Root of every exception thrown by the library. The category decides the
/// exit code the command-line tool maps it to.
class Error : public std::runtime_error {
 public:
  enum class Category { usage, data, numeric };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(Category::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(Category::numeric, what) {}
};

// --- data errors ---

class MalformedRecord : public DataError {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : DataError("malformed record at line " + std::to_string(line) + ": " +
                  reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabel : public DataError {
 public:
  UnknownLabel(std::size_t line, const std::string& label)
      : DataError("unknown label '" + label + "' at line " +
                  std::to_string(line) + " (expected 0 or 1)"),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BothOrNeitherSarcastic : public DataError {
 public:
  BothOrNeitherSarcastic(std::size_t line, const std::string& context_id)
      : DataError("pair '" + context_id + "' at line " + std::to_string(line) +
                  " must mark exactly one statement as sarcastic") {}
};

class EmptySplit : public DataError {
 public:
  explicit EmptySplit(const std::string& split)
      : DataError("split '" + split + "' is empty") {}
};

class EmptyCorpus : public DataError {
 public:
  EmptyCorpus()
      : DataError("corpus has no sentence with at least two tokens") {}
};

class CorruptCheckpoint : public DataError {
 public:
  explicit CorruptCheckpoint(const std::string& what)
      : DataError("corrupt checkpoint: " + what) {}
};

class ShapeManifestMismatch : public DataError {
 public:
  explicit ShapeManifestMismatch(const std::string& what)
      : DataError("checkpoint shape mismatch: " + what) {}
};

class LengthMismatch : public DataError {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : DataError("length mismatch: " + std::to_string(a) + " vs " +
                  std::to_string(b)) {}
};

// --- shape / numeric errors ---

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what)
      : Error(Category::usage, "shape mismatch: " + what) {}
};

class NonFiniteGradient : public NumericError {
 public:
  explicit NonFiniteGradient(const std::string& param)
      : NumericError("non-finite gradient in parameter '" + param + "'") {}
};

class NonFiniteLoss : public NumericError {
 public:
  NonFiniteLoss(std::size_t epoch, std::size_t step)
      : NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                     ", step " + std::to_string(step)) {}
};

}  // namespace cuenet
