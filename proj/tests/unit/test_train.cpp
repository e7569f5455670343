#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "cuenet/classifier/io.hpp"
#include "cuenet/encoder/language_model.hpp"
#include "cuenet/error.hpp"
#include "cuenet/rng.hpp"
#include "cuenet/text/tokenizer.hpp"
#include "cuenet/train/scheduler.hpp"
#include "cuenet/train/trainer.hpp"
#include "fixtures.hpp"

using namespace cuenet;
using namespace cuenet::train;
namespace fx = cuenet::testing;

// --- Scheduler ---

TEST(Scheduler, DecaysAfterOneFlatEpoch) {
  PlateauScheduler s(1e-3, 0.5, 1, 1e-6);
  EXPECT_TRUE(s.observe(0.60).improved);
  EXPECT_TRUE(s.observe(0.65).improved);
  const auto o = s.observe(0.64);
  EXPECT_FALSE(o.improved);
  EXPECT_TRUE(o.decayed);
  EXPECT_DOUBLE_EQ(s.lr(), 0.0005);
  EXPECT_DOUBLE_EQ(s.best(), 0.65);
}

TEST(Scheduler, LongPlateauDecaysOnce) {
  PlateauScheduler s(1e-3, 0.5, 1, 1e-6);
  s.observe(0.6);
  EXPECT_TRUE(s.observe(0.5).decayed);
  EXPECT_FALSE(s.observe(0.5).decayed);
  EXPECT_FALSE(s.observe(0.6).decayed);  // ties do not improve
  EXPECT_EQ(s.epochs_since_improvement(), 3u);
  EXPECT_DOUBLE_EQ(s.lr(), 5e-4);
  EXPECT_TRUE(s.observe(0.7).improved);
  EXPECT_TRUE(s.observe(0.1).decayed);
  EXPECT_DOUBLE_EQ(s.lr(), 2.5e-4);
  EXPECT_EQ(s.decays(), 2u);
}

TEST(Scheduler, PatienceTwo) {
  PlateauScheduler s(0.1, 0.1, 2, 0.0);
  s.observe(0.5);
  EXPECT_FALSE(s.observe(0.4).decayed);
  EXPECT_TRUE(s.observe(0.4).decayed);
  EXPECT_NEAR(s.lr(), 0.01, 1e-15);
}

TEST(Scheduler, SkipsDecayBelowMinimum) {
  PlateauScheduler s(1e-3, 0.5, 1, 8e-4);
  s.observe(0.5);
  EXPECT_FALSE(s.observe(0.4).decayed);
  EXPECT_DOUBLE_EQ(s.lr(), 1e-3);
  EXPECT_EQ(s.decays(), 0u);
}

TEST(Scheduler, FirstObservationAlwaysImproves) {
  PlateauScheduler s(1e-3, 0.5, 1, 0.0);
  EXPECT_EQ(s.best(), -std::numeric_limits<double>::infinity());
  EXPECT_TRUE(s.observe(0.0).improved);
}

TEST(Scheduler, MatchesAStraightSimulationOnRandomTraces) {
  // Reference: count the plateau; on reaching patience exactly, try one
  // decay lr0 * factor^(k+1).
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t patience = 1 + rng.index(3);
    const double factor = 0.5;
    const double min_lr = rng.bernoulli(0.5) ? 0.0 : 1e-4;
    PlateauScheduler s(1e-3, factor, patience, min_lr);
    double best = -1.0;
    std::size_t flat = 0;
    std::size_t k = 0;
    double lr = 1e-3;
    for (int e = 0; e < 30; ++e) {
      const double acc = 0.1 * static_cast<double>(rng.index(8));
      bool decayed = false;
      if (acc > best) {
        best = acc;
        flat = 0;
      } else if (++flat == patience) {
        const double next = 1e-3 * std::pow(factor, static_cast<double>(k + 1));
        if (next >= min_lr) {
          ++k;
          lr = next;
          decayed = true;
        }
      }
      const auto o = s.observe(acc);
      ASSERT_EQ(o.decayed, decayed) << trial << ":" << e;
      ASSERT_NEAR(s.lr(), lr, 1e-18);
    }
  }
}

// --- Trainer ---

namespace {

corpus::Dataset cue_data(std::size_t n = 80, std::uint64_t seed = 5) {
  return fx::make_dataset(fx::cue_corpus(n, seed),
                          [](std::string_view raw) { return text::tokenize(raw); });
}

struct Setup {
  corpus::Dataset data;
  std::shared_ptr<const encoder::EncoderModel> encoder;
  classifier::ClassifierConfig cfg;

  classifier::ClassifierModel model(std::uint64_t seed) const {
    return classifier::ClassifierModel(cfg, encoder, seed);
  }
};

Setup setup(corpus::Dataset data) {
  const auto sentences = fx::all_sentences(data);
  auto enc = fx::tiny_encoder(sentences);
  auto cfg = fx::tiny_classifier_config(enc->config());
  return {std::move(data), enc, cfg};
}

TrainConfig quick(std::size_t epochs = 6) {
  TrainConfig c;
  c.lr0 = 0.01;
  c.max_epochs = epochs;
  c.seed = 3;
  return c;
}

}  // namespace

TEST(Trainer, SameSeedSameRun) {
  const auto s = setup(cue_data());
  auto a = s.model(1);
  auto b = s.model(1);
  const auto ra = train::train(a, s.data, quick());
  const auto rb = train::train(b, s.data, quick());
  ASSERT_EQ(ra.records.size(), rb.records.size());
  for (std::size_t i = 0; i < ra.records.size(); ++i) {
    EXPECT_EQ(ra.records[i].train_loss, rb.records[i].train_loss);
    EXPECT_EQ(ra.records[i].val_accuracy, rb.records[i].val_accuracy);
  }
  for (std::size_t i = 0; i < a.params().size(); ++i) {
    EXPECT_EQ(a.params().entries()[i].value, b.params().entries()[i].value);
  }
}

TEST(Trainer, ModelEndsAtItsBestValidationEpoch) {
  const auto s = setup(cue_data());
  auto model = s.model(2);
  std::vector<EpochRecord> seen;
  TrainConfig cfg = quick(10);
  fx::TempDir dir;
  cfg.best_checkpoint = dir / "best.ckpt";
  const auto state = train::train(model, s.data, cfg, [&](const EpochRecord& r) { seen.push_back(r); });
  ASSERT_EQ(seen.size(), state.records.size());

  // The first epoch reaching the maximum is the one kept.
  double best = -1.0;
  std::size_t best_epoch = 0;
  for (const auto& r : state.records) {
    if (r.val_accuracy > best) {
      best = r.val_accuracy;
      best_epoch = r.epoch;
    }
  }
  EXPECT_EQ(state.best_epoch, best_epoch);
  EXPECT_DOUBLE_EQ(state.best_val_accuracy, best);

  const auto prepared = prepare(model, s.data);
  EXPECT_DOUBLE_EQ(accuracy(model, prepared.valid, prepared.valid_labels), best);
  const auto saved = classifier::load_classifier(*cfg.best_checkpoint);
  EXPECT_NEAR(accuracy(saved, prepared.valid, prepared.valid_labels), best, 1e-12);
}

TEST(Trainer, RecordsFollowTheSchedule) {
  const auto s = setup(cue_data());
  auto model = s.model(3);
  TrainConfig cfg = quick(12);
  const auto state = train::train(model, s.data, cfg);
  PlateauScheduler ref(cfg.lr0, cfg.decay_factor, cfg.plateau_patience, cfg.min_lr);
  double lr = cfg.lr0;
  for (const auto& r : state.records) {
    EXPECT_DOUBLE_EQ(r.lr, lr);  // rate in force during the epoch
    const auto o = ref.observe(r.val_accuracy);
    EXPECT_EQ(r.improved, o.improved);
    EXPECT_EQ(r.decayed, o.decayed);
    lr = ref.lr();
  }
  EXPECT_EQ(state.decays, ref.decays());
  EXPECT_DOUBLE_EQ(state.current_lr, ref.lr());
}

TEST(Trainer, LearnsALexicallySeparableSet) {
  // The label is carried by a single marker word among random fillers.
  Rng rng(8);
  const std::vector<std::string> filler = {"we", "the", "day", "went", "home", "it", "was", "so"};
  std::vector<fx::LabeledText> records;
  for (int i = 0; i < 100; ++i) {
    const bool positive = i % 2 == 0;
    std::string text;
    for (int k = 0; k < 4; ++k) text += filler[rng.index(filler.size())] + " ";
    text += positive ? "yeah" : "okay";
    records.push_back({text, positive ? Label::positive : Label::negative});
  }
  const auto data = fx::make_dataset(records, [](std::string_view raw) {
    return text::tokenize(raw);
  });
  // Through two random LSTM layers the marker barely moves the top layer;
  // the learned mix also sees the character layer, where it is plain.
  auto enc_cfg = fx::tiny_encoder_config();
  enc_cfg.mix_mode = encoder::MixMode::learned_scalar_mix;
  enc_cfg.d_word = enc_cfg.d_lm;
  const auto sentences = fx::all_sentences(data);
  auto enc = std::make_shared<encoder::EncoderModel>(encoder::make_encoder(enc_cfg, sentences, 7));
  enc->freeze();
  auto cfg = fx::tiny_classifier_config(enc_cfg);
  cfg.ffn_units = 16;
  cfg.lstm_hidden = 8;
  classifier::ClassifierModel model(cfg, enc, 4);

  TrainConfig tc = quick(30);
  const auto state = train::train(model, data, tc);
  EXPECT_GE(state.best_val_accuracy, 0.8);
  EXPECT_LT(state.records.back().train_loss, 0.6);  // from ln 2 = 0.693
}

TEST(Trainer, EarlyStopAfterPatienceWithoutImprovement) {
  const auto s = setup(fx::random_label_dataset(30, 2));
  auto model = s.model(5);
  TrainConfig cfg = quick(40);
  cfg.early_stop_patience = 3;
  const auto state = train::train(model, s.data, cfg);
  // One validation example: accuracy is 0 or 1, so improvement stops fast.
  EXPECT_EQ(state.stop_reason, StopReason::early_stop);
  EXPECT_EQ(state.records.size(), state.best_epoch + 3);
  EXPECT_EQ(state.epochs_since_improvement, 3u);
}

TEST(Trainer, EmptySplitsAndBadConfig) {
  const auto s = setup(cue_data());
  auto model = s.model(1);
  auto no_valid = s.data;
  no_valid.valid.clear();
  EXPECT_THROW(train::train(model, no_valid, quick()), EmptySplit);
  auto no_train = s.data;
  no_train.train.clear();
  EXPECT_THROW(train::train(model, no_train, quick()), EmptySplit);

  TrainConfig bad = quick();
  bad.lr0 = 0.0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = quick();
  bad.decay_factor = 1.0;
  EXPECT_THROW(bad.validate(), UsageError);
  bad = quick();
  bad.max_epochs = 0;
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(Trainer, DivergenceIsANumericError) {
  const auto s = setup(cue_data());
  auto model = s.model(1);
  TrainConfig cfg = quick(3);
  cfg.lr0 = 1e300;
  cfg.clip_norm = 0.0;
  EXPECT_THROW(train::train(model, s.data, cfg), NumericError);
}

// --- Ensembles ---

TEST(Ensemble, ConsecutiveSeeds) {
  EXPECT_EQ(consecutive_seeds(3, 7), (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_TRUE(consecutive_seeds(0, 7).empty());
}

TEST(Ensemble, MembersAreDistinctAndThreadCountDoesNotMatter) {
  const auto s = setup(cue_data());
  const ModelFactory factory = [&](std::uint64_t seed) { return s.model(seed); };
  const auto seeds = consecutive_seeds(3, 11);
  const auto serial = train_ensemble(3, seeds, factory, s.data, quick(4), 1);
  const auto parallel = train_ensemble(3, seeds, factory, s.data, quick(4), 3);
  ASSERT_EQ(serial.size(), 3u);
  ASSERT_EQ(parallel.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(serial[i].seed, seeds[i]);
    EXPECT_EQ(parallel[i].seed, seeds[i]);
    const auto& pa = serial[i].model.params().entries();
    const auto& pb = parallel[i].model.params().entries();
    for (std::size_t j = 0; j < pa.size(); ++j) EXPECT_EQ(pa[j].value, pb[j].value);
  }
  EXPECT_NE(serial[0].model.params().entries()[0].value,
            serial[1].model.params().entries()[0].value);
  EXPECT_NE(serial[1].model.params().entries()[0].value,
            serial[2].model.params().entries()[0].value);
}

TEST(Ensemble, CheckpointPerSeed) {
  const auto s = setup(cue_data());
  fx::TempDir dir;
  TrainConfig cfg = quick(2);
  cfg.best_checkpoint = dir / "model.ckpt";
  const ModelFactory factory = [&](std::uint64_t seed) { return s.model(seed); };
  train_ensemble(2, {4, 9}, factory, s.data, cfg, 2);
  EXPECT_TRUE(std::filesystem::exists(dir / "model.ckpt.seed4"));
  EXPECT_TRUE(std::filesystem::exists(dir / "model.ckpt.seed9"));
}

TEST(Ensemble, SeedListMustMatch) {
  const auto s = setup(cue_data());
  const ModelFactory factory = [&](std::uint64_t seed) { return s.model(seed); };
  EXPECT_THROW(train_ensemble(2, {1, 1}, factory, s.data, quick(1)), UsageError);
  EXPECT_THROW(train_ensemble(3, {1, 2}, factory, s.data, quick(1)), UsageError);
  EXPECT_THROW(train_ensemble(0, {}, factory, s.data, quick(1)), UsageError);
}
