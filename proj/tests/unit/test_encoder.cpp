#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "cuenet/encoder/config.hpp"
#include "cuenet/encoder/encoder.hpp"
#include "cuenet/encoder/io.hpp"
#include "cuenet/encoder/language_model.hpp"
#include "cuenet/encoder/vocab.hpp"
#include "cuenet/error.hpp"
#include "cuenet/nn/checkpoint.hpp"
#include "cuenet/nn/grad_check.hpp"
#include "cuenet/text/tokenizer.hpp"
#include "fixtures.hpp"

using namespace cuenet;
using namespace cuenet::encoder;
using cuenet::testing::tiny_encoder_config;

namespace {

std::vector<text::TokenSequence> small_corpus() {
  return {text::tokenize("the cat sat on the mat"), text::tokenize("a Cat ran"),
          text::tokenize("SOOO great :) #mondays"), text::tokenize("caf\xC3\xA9 time")};
}

EncoderModel build(std::uint64_t seed = 3) {
  const auto corpus = small_corpus();
  return make_encoder(tiny_encoder_config(), corpus, seed);
}

bool tensors_differ(const nn::Tensor& a, const nn::Tensor& b, double tol = 1e-9) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return true;
  }
  return false;
}

}  // namespace

TEST(Encoder, OutputShapes) {
  const auto model = build();
  const auto sentence = text::tokenize("the cat sat on");
  const auto out = model.layers(sentence);
  EXPECT_EQ(out.words.shape(), (nn::Shape{4, 6}));
  ASSERT_EQ(out.layers.size(), 2u);
  for (const auto& l : out.layers) EXPECT_EQ(l.shape(), (nn::Shape{4, 10}));
  EXPECT_EQ(model.contextualize(sentence).shape(), (nn::Shape{4, 10}));
  EXPECT_THROW(model.contextualize(text::TokenSequence{}), UsageError);
}

TEST(Encoder, CaseReachesTheCharacterLayer) {
  const auto model = build();
  EXPECT_TRUE(tensors_differ(model.encode_word("Cat"), model.encode_word("cat")));
  EXPECT_TRUE(tensors_differ(model.encode_word("GREAT"), model.encode_word("great")));
}

TEST(Encoder, SameSeedSameModel) {
  const auto a = build(9);
  const auto b = build(9);
  const auto c = build(10);
  const auto sentence = text::tokenize("a Cat sat");
  EXPECT_EQ(a.contextualize(sentence), b.contextualize(sentence));
  EXPECT_EQ(a.contextualize(sentence), a.contextualize(sentence));
  EXPECT_TRUE(tensors_differ(a.contextualize(sentence), c.contextualize(sentence)));
}

TEST(Encoder, ZeroLstmWeightsGiveZeroLayers) {
  auto model = build();
  for (auto& p : model.params().entries()) {
    if (p.name.rfind("bilm/", 0) == 0) p.value.fill(0.0);
  }
  // All gates sit at 0.5 and the candidate at tanh(0) = 0, so c and h stay 0.
  const auto out = model.layers(text::tokenize("the cat sat"));
  for (const auto& l : out.layers) {
    for (double v : l.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Encoder, VectorsDependOnContextInTheRightDirection) {
  const auto model = build();
  const auto a = model.contextualize(text::tokenize("the cat sat"));
  const auto b = model.contextualize(text::tokenize("the cat ran"));
  const auto c = model.contextualize(text::tokenize("a cat sat"));
  const std::size_t h = model.config().d_lm;
  // "cat" (t = 1) changes with either neighbour.
  bool any_b = false;
  bool any_c = false;
  for (std::size_t j = 0; j < 2 * h; ++j) {
    any_b |= std::abs(a(1, j) - b(1, j)) > 1e-9;
    any_c |= std::abs(a(1, j) - c(1, j)) > 1e-9;
  }
  EXPECT_TRUE(any_b);
  EXPECT_TRUE(any_c);
  // The forward half never sees later words; the backward half never sees
  // earlier ones.
  for (std::size_t j = 0; j < h; ++j) {
    EXPECT_EQ(a(1, j), b(1, j));
    EXPECT_EQ(a(2, h + j), c(2, h + j));
    EXPECT_EQ(a(1, h + j), c(1, h + j));
  }
}

TEST(LanguageModel, ZeroSoftmaxGivesPerplexityOfVocabularySize) {
  auto model = build();
  model.params().value("lm/softmax/weight").fill(0.0);
  model.params().value("lm/softmax/bias").fill(0.0);
  const auto corpus = small_corpus();
  const auto e = evaluate_lm(model, corpus);
  // Each sentence of T tokens predicts T - 1 next and T - 1 previous words.
  EXPECT_EQ(e.predictions, 2u * (5 + 2 + 3 + 1));
  EXPECT_NEAR(e.perplexity(), static_cast<double>(model.word_vocab().size()), 1e-9);
}

TEST(LanguageModel, SingleTokenSentencesPredictNothing) {
  auto model = build();
  const std::vector<text::TokenSequence> corpus = {text::tokenize("alone")};
  EXPECT_EQ(evaluate_lm(model, corpus).predictions, 0u);
  LmOptions opts;
  opts.epochs = 30;
  EXPECT_THROW(pretrain_lm(corpus, model, opts), EmptyCorpus);
}

TEST(LanguageModel, FrozenModelCannotBePretrained) {
  auto model = build();
  model.freeze();
  EXPECT_TRUE(model.frozen());
  const auto corpus = small_corpus();
  EXPECT_THROW(pretrain_lm(corpus, model, LmOptions{}), UsageError);
}

TEST(LanguageModel, GradientsMatchFiniteDifferences) {
  auto model = build();
  const auto sentence = text::tokenize("the Cat sat :)");
  const nn::LossFunction loss = [&](nn::ParamStore&, bool with_grad) {
    return lm_sentence_loss(model, sentence, with_grad).nll;
  };
  const auto r = nn::grad_check(loss, model.params(), {.coordinates = 400, .seed = 4});
  EXPECT_GT(r.checked, 300u);
  EXPECT_LT(r.max_relative_error, 1e-5) << r.worst_parameter << "[" << r.worst_index << "]";
}

TEST(LanguageModel, PretrainingLearnsACyclicCorpus) {
  const auto corpus = cuenet::testing::cyclic_corpus(20, 9);
  auto model = make_encoder(tiny_encoder_config(), corpus, 5);
  LmOptions opts;
  opts.epochs = 30;
  opts.lr = 0.02;
  opts.batch_size = 4;
  std::size_t callbacks = 0;
  opts.on_epoch = [&](const LmEpochRecord&) { ++callbacks; };
  const auto log = pretrain_lm(corpus, model, opts);
  EXPECT_EQ(callbacks, 30u);
  ASSERT_EQ(log.epochs.size(), 30u);
  // a b c a b c ...: every neighbour is determined, and V = 4 with <unk>.
  EXPECT_GT(log.initial_perplexity, 2.0);
  EXPECT_LT(log.best_perplexity, 1.5);
  EXPECT_NEAR(evaluate_lm(model, corpus).perplexity(), log.best_perplexity, 1e-9);
}

TEST(EncoderIo, SaveLoadIsExact) {
  cuenet::testing::TempDir dir;
  auto model = build();
  model.params().round_to_float32();
  save_encoder(dir / "enc.ckpt", model);
  const auto loaded = load_encoder(dir / "enc.ckpt");
  EXPECT_TRUE(loaded.frozen());
  EXPECT_EQ(loaded.config(), model.config());
  EXPECT_EQ(loaded.word_vocab().words(), model.word_vocab().words());
  EXPECT_EQ(loaded.char_vocab().codepoints(), model.char_vocab().codepoints());
  const auto sentence = text::tokenize("caf\xC3\xA9 Cat :) unseenword");
  EXPECT_EQ(loaded.contextualize(sentence), model.contextualize(sentence));
}

TEST(EncoderIo, TruncatedFileIsCorrupt) {
  cuenet::testing::TempDir dir;
  save_encoder(dir / "enc.ckpt", build());
  std::string bytes;
  {
    std::ifstream in(dir / "enc.ckpt", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  std::ofstream(dir / "cut.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  EXPECT_THROW(load_encoder(dir / "cut.ckpt"), CorruptCheckpoint);
}

TEST(EncoderIo, ShapesThatDisagreeWithTheMetadataAreRejected) {
  cuenet::testing::TempDir dir;
  const auto model = build();
  auto other_cfg = tiny_encoder_config();
  other_cfg.d_word = 7;
  const auto corpus = small_corpus();
  const auto other = make_encoder(other_cfg, corpus, 3);
  nn::save_checkpoint(dir / "bad.ckpt", other.params(), encoder_metadata_json(model));
  EXPECT_THROW(load_encoder(dir / "bad.ckpt"), ShapeManifestMismatch);
}

TEST(EncoderConfig, ValidationAndJson) {
  auto cfg = tiny_encoder_config();
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.filter_total(), 10u);
  EXPECT_EQ(EncoderConfig::from_json(cfg.to_json()), cfg);

  cfg.mix_mode = MixMode::learned_scalar_mix;
  EXPECT_THROW(cfg.validate(), UsageError);  // d_word 6 vs d_lm 5
  cfg.d_word = 5;
  EXPECT_NO_THROW(cfg.validate());
  cfg.d_word = 10;
  EXPECT_NO_THROW(cfg.validate());

  auto empty = tiny_encoder_config();
  empty.filters.clear();
  EXPECT_THROW(empty.validate(), UsageError);

  const auto big = EncoderConfig::paper_scale();
  EXPECT_EQ(big.d_ctx(), 1024u);
  EXPECT_EQ(big.filter_total(), 2048u);
}

TEST(ScalarMix, StartsAsTheMeanOfItsInputs) {
  nn::ParamStore store;
  const auto mix = ScalarMix::create(store, "mix", 3);
  const std::vector<nn::Tensor> xs = {nn::Tensor::vector({3, 0}), nn::Tensor::vector({0, 3}),
                                      nn::Tensor::vector({3, 3})};
  const auto y = mix.forward(store, xs);
  EXPECT_NEAR(y[0], 2.0, 1e-12);
  EXPECT_NEAR(y[1], 2.0, 1e-12);
  store.value("mix/gamma")[0] = 0.5;
  EXPECT_NEAR(mix.forward(store, xs)[0], 1.0, 1e-12);
}

TEST(ScalarMix, EncoderMixInputsLineUp) {
  auto cfg = tiny_encoder_config();
  cfg.mix_mode = MixMode::learned_scalar_mix;
  cfg.d_word = 5;
  const auto corpus = small_corpus();
  const auto model = make_encoder(cfg, corpus, 1);
  const auto sentence = text::tokenize("the cat");
  const auto inputs = model.mix_inputs(model.layers(sentence));
  ASSERT_EQ(inputs.size(), model.mix_width());
  for (const auto& x : inputs) EXPECT_EQ(x.shape(), (nn::Shape{2, 10}));
  // With no learned mix every layer weighs one third.
  const auto y = model.contextualize(sentence);
  EXPECT_NEAR(y(1, 7), (inputs[0](1, 7) + inputs[1](1, 7) + inputs[2](1, 7)) / 3.0, 1e-12);
}

TEST(CharVocab, ReservedIndicesAndAscii) {
  const CharVocab v;
  EXPECT_GE(v.index(U'A'), CharVocab::kReserved);
  EXPECT_NE(v.index(U'A'), v.index(U'a'));
  EXPECT_EQ(v.index(U'é'), CharVocab::kUnknown);
  const auto ids = v.encode("Hey", 50);
  ASSERT_EQ(ids.size(), 5u);
  EXPECT_EQ(ids.front(), CharVocab::kBeginWord);
  EXPECT_EQ(ids.back(), CharVocab::kEndWord);
  EXPECT_EQ(v.encode("abcdefgh", 3).size(), 5u);

  const std::vector<text::TokenSequence> corpus = {text::tokenize("caf\xC3\xA9")};
  EXPECT_GE(CharVocab::build(corpus).index(U'é'), CharVocab::kReserved);
}

TEST(WordVocab, FrequencyOrderWithByteOrderTies) {
  const std::vector<text::TokenSequence> corpus = {text::tokenize("b a c a b d"),
                                                   text::tokenize("a")};
  const auto v = WordVocab::build(corpus, 2);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<unk>", "a", "b"}));
  EXPECT_EQ(v.index("c"), WordVocab::kUnknown);
  EXPECT_EQ(v.index("b"), 2u);
  EXPECT_THROW(WordVocab::from_words({"a"}), Error);
}
