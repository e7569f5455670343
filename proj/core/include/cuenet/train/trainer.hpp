#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cuenet/classifier/model.hpp"
#include "cuenet/corpus/dataset.hpp"

namespace cuenet::train {

struct TrainConfig {
  double lr0 = 1e-3;
  double decay_factor = 0.5;
  std::size_t plateau_patience = 1;
  double min_lr = 1e-6;
  std::size_t max_epochs = 50;
  std::size_t early_stop_patience = 10;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 5.0;
  /// Drives shuffling and dropout masks.
  std::uint64_t seed = 1;
  /// Where the best model is written whenever validation accuracy improves.
  std::optional<std::filesystem::path> best_checkpoint;

  /// Throws UsageError.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean over examples
  double val_accuracy = 0.0;
  /// Rate used for this epoch's updates.
  double lr = 0.0;
  bool improved = false;
  bool decayed = false;
};

enum class StopReason { max_epochs, early_stop };

struct TrainState {
  std::size_t epoch = 0;
  double current_lr = 0.0;
  std::size_t decays = 0;
  double best_val_accuracy = 0.0;
  std::size_t best_epoch = 0;
  std::optional<std::filesystem::path> best_checkpoint;
  std::size_t epochs_since_improvement = 0;
  std::vector<EpochRecord> records;
  StopReason stop_reason = StopReason::max_epochs;
};

/// Encoder features of every train and valid example, computed once.
struct PreparedData {
  std::vector<classifier::Features> train;
  std::vector<Label> train_labels;
  std::vector<classifier::Features> valid;
  std::vector<Label> valid_labels;
};

/// Throws EmptySplit when the train or valid split is empty.
PreparedData prepare(const classifier::ClassifierModel& model, const corpus::Dataset& data);

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on the mean cross-entropy, batches of the model's
/// batch_size drawn from a seeded shuffle each epoch. After training the
/// model holds the parameters of its best validation epoch. Throws
/// NonFiniteLoss, EmptySplit, UsageError.
TrainState train(classifier::ClassifierModel& model, const corpus::Dataset& data,
                 const TrainConfig& config, const EpochCallback& on_epoch = {});
TrainState train(classifier::ClassifierModel& model, const PreparedData& data,
                 const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Accuracy of eval-mode predictions on prepared features.
double accuracy(const classifier::ClassifierModel& model,
                const std::vector<classifier::Features>& features,
                const std::vector<Label>& labels);

inline constexpr std::size_t kDefaultEnsembleSize = 10;

struct EnsembleMember {
  std::uint64_t seed = 0;
  classifier::ClassifierModel model;
  TrainState state;
};

/// Builds a fresh model for a seed (used for its parameter initialization).
using ModelFactory = std::function<classifier::ClassifierModel(std::uint64_t seed)>;

/// One independent run per seed; each uses its seed both for the model
/// and TrainConfig::seed, and writes to "<best_checkpoint>.seed<seed>"
/// when a checkpoint path is set. Members run on up to `threads` threads
/// and come back in seed order. Throws UsageError unless `seeds` holds `k`
/// distinct values.
std::vector<EnsembleMember> train_ensemble(std::size_t k, const std::vector<std::uint64_t>& seeds,
                                           const ModelFactory& factory,
                                           const corpus::Dataset& data, const TrainConfig& config,
                                           std::size_t threads = 1);

/// seeds base, base + 1, ..., base + k - 1.
std::vector<std::uint64_t> consecutive_seeds(std::size_t k, std::uint64_t base);

}  // namespace cuenet::train
