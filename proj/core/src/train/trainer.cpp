#include "cuenet/train/trainer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "cuenet/classifier/io.hpp"
#include "cuenet/error.hpp"
#include "cuenet/nn/adam.hpp"
#include "cuenet/nn/loss.hpp"
#include "cuenet/train/scheduler.hpp"

namespace cuenet::train {

using classifier::ClassifierModel;
using classifier::Features;

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw UsageError("lr0 must be positive");
  if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
    throw UsageError("decay_factor must be in (0, 1)");
  }
  if (plateau_patience == 0) throw UsageError("plateau_patience must be at least 1");
  if (max_epochs == 0) throw UsageError("max_epochs must be at least 1");
  if (early_stop_patience == 0) throw UsageError("early_stop_patience must be at least 1");
  if (min_lr < 0.0) throw UsageError("min_lr must not be negative");
  if (clip_norm < 0.0) throw UsageError("clip_norm must not be negative");
}

PreparedData prepare(const ClassifierModel& model, const corpus::Dataset& data) {
  if (data.train.empty()) throw EmptySplit("train");
  if (data.valid.empty()) throw EmptySplit("valid");
  PreparedData out;
  for (const auto& ex : data.train) {
    out.train.push_back(model.features(ex.tokens));
    out.train_labels.push_back(ex.label);
  }
  for (const auto& ex : data.valid) {
    out.valid.push_back(model.features(ex.tokens));
    out.valid_labels.push_back(ex.label);
  }
  return out;
}

double accuracy(const ClassifierModel& model, const std::vector<Features>& features,
                const std::vector<Label>& labels) {
  if (features.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto p = classifier::prediction_from_logits(
        model.forward_features(features[i], false, nullptr));
    if (p.label == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.size());
}

TrainState train(ClassifierModel& model, const corpus::Dataset& data, const TrainConfig& config,
                 const EpochCallback& on_epoch) {
  config.validate();
  return train(model, prepare(model, data), config, on_epoch);
}

TrainState train(ClassifierModel& model, const PreparedData& data, const TrainConfig& config,
                 const EpochCallback& on_epoch) {
  config.validate();
  if (data.train.empty()) throw EmptySplit("train");
  if (data.valid.empty()) throw EmptySplit("valid");

  nn::ParamStore& params = model.params();
  const std::size_t batch_size = model.config().batch_size;
  PlateauScheduler scheduler(config.lr0, config.decay_factor, config.plateau_patience,
                             config.min_lr);
  nn::AdamState adam(config.lr0);
  Rng rng(config.seed);
  nn::ParamStore best = params;

  TrainState state;
  state.best_checkpoint = config.best_checkpoint;
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  params.zero_grad();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.lr = scheduler.lr();
    adam.set_learning_rate(scheduler.lr());
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t step = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size, ++step) {
      const std::size_t end = std::min(start + batch_size, order.size());
      const double scale = 1.0 / static_cast<double>(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        ClassifierModel::Cache cache;
        const nn::Tensor logits = model.forward_features(data.train[i], true, &rng, &cache);
        nn::Tensor dlogits;
        const double loss = nn::cross_entropy(logits, to_int(data.train_labels[i]), &dlogits);
        if (!std::isfinite(loss)) throw NonFiniteLoss(epoch, step);
        loss_sum += loss;
        for (double& g : dlogits.values()) g *= scale;
        model.backward(cache, dlogits);
      }
      if (config.clip_norm > 0.0) {
        const double norm = params.grad_norm();
        if (norm > config.clip_norm) params.scale_grads(config.clip_norm / norm);
      }
      nn::adam_step(params, adam);
    }
    record.train_loss = loss_sum / static_cast<double>(order.size());
    record.val_accuracy = accuracy(model, data.valid, data.valid_labels);

    const auto outcome = scheduler.observe(record.val_accuracy);
    record.improved = outcome.improved;
    record.decayed = outcome.decayed;
    if (outcome.improved) {
      best = params;
      state.best_epoch = epoch;
      state.best_val_accuracy = record.val_accuracy;
      if (config.best_checkpoint) classifier::save_classifier(*config.best_checkpoint, model);
    }
    state.epoch = epoch;
    state.current_lr = scheduler.lr();
    state.decays = scheduler.decays();
    state.epochs_since_improvement = scheduler.epochs_since_improvement();
    state.records.push_back(record);
    if (on_epoch) on_epoch(record);
    if (scheduler.epochs_since_improvement() >= config.early_stop_patience) {
      state.stop_reason = StopReason::early_stop;
      break;
    }
  }
  params.copy_values_from(best);
  params.zero_grad();
  return state;
}

std::vector<std::uint64_t> consecutive_seeds(std::size_t k, std::uint64_t base) {
  std::vector<std::uint64_t> seeds(k);
  std::iota(seeds.begin(), seeds.end(), base);
  return seeds;
}

std::vector<EnsembleMember> train_ensemble(std::size_t k, const std::vector<std::uint64_t>& seeds,
                                           const ModelFactory& factory,
                                           const corpus::Dataset& data, const TrainConfig& config,
                                           std::size_t threads) {
  config.validate();
  if (k == 0) throw UsageError("ensemble size must be at least 1");
  if (seeds.size() != k) {
    throw UsageError("ensemble of " + std::to_string(k) + " needs " + std::to_string(k) +
                     " seeds, got " + std::to_string(seeds.size()));
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != k) {
    throw UsageError("ensemble seeds must be distinct");
  }

  std::vector<std::optional<ClassifierModel>> models;
  for (auto seed : seeds) models.emplace_back(factory(seed));
  // Members sharing one encoder share its features too.
  const bool shared = std::all_of(models.begin(), models.end(), [&](const auto& m) {
    return m->shared_encoder() == models.front()->shared_encoder();
  });
  std::optional<PreparedData> common;
  if (shared) common = prepare(*models.front(), data);

  std::vector<std::optional<TrainState>> states(k);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < k; i = next++) {
      try {
        TrainConfig member = config;
        member.seed = seeds[i];
        if (config.best_checkpoint) {
          member.best_checkpoint =
              config.best_checkpoint->string() + ".seed" + std::to_string(seeds[i]);
        }
        states[i] = common ? train(*models[i], *common, member)
                           : train(*models[i], prepare(*models[i], data), member);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(threads, k));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EnsembleMember> out;
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(EnsembleMember{seeds[i], std::move(*models[i]), std::move(*states[i])});
  }
  return out;
}

}  // namespace cuenet::train
