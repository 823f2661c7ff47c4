// Copyright 2026 NAST Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "nast/eval.hpp"
#include "nast/tokenize.hpp"
#include "nast/train.hpp"
#include "testutil.hpp"

using namespace nast;
using testutil::TempDir;
using testutil::rel_err;

namespace {

NastConfig small_model(int64_t k = 8, int64_t d = 8, uint64_t seed = 5) {
  NastConfig c;
  c.k = k;
  c.input_dim = d;
  c.global_dim = 6;
  c.decoder_out_dim = d;
  c.predictor_blocks = 1;
  c.attention_heads = 2;
  c.conv_kernel = 3;
  c.ffn_dim = 2 * d;
  c.tau_decay_steps = 200;
  c.seed = seed;
  return c;
}

FeatureSequence random_seq(int64_t t, int64_t d, uint64_t seed) {
  FeatureSequence seq;
  seq.utterance_id = "u" + std::to_string(seed);
  seq.frames = FloatMat(t, d);
  Rng rng(seed);
  for (auto& v : seq.frames.data) v = static_cast<float>(rng.gaussian());
  return seq;
}

std::vector<nlohmann::json> read_log(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<nlohmann::json> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  return lines;
}

SyntheticSpec quick_corpus_spec(int64_t utterances, uint64_t seed) {
  SyntheticSpec spec;
  spec.num_utterances = utterances;
  spec.num_phonemes = 4;
  spec.num_speakers = 2;
  spec.feature_dim = 8;
  spec.mean_duration_frames = 4.0;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("tau schedule follows the configured exponential decay") {
  NastConfig c = small_model();
  c.tau_start = 2.0;
  c.tau_end = 0.5;
  c.tau_decay_steps = 100;
  CHECK(c.tau_at_step(0) == doctest::Approx(2.0));
  CHECK(c.tau_at_step(100) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.tau_at_step(5000) == doctest::Approx(0.5));
  const double expected_half = 2.0 * std::exp(-50.0 * std::log(4.0) / 100.0);
  CHECK(c.tau_at_step(50) == doctest::Approx(expected_half).epsilon(1e-12));
  double prev = c.tau_at_step(0);
  for (int64_t s = 1; s <= 150; ++s) {
    const double cur = c.tau_at_step(s);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
}

TEST_CASE("analytic parameter gradients match finite differences end to end") {
  // The full composite objective (recon + diversity + robust through Gumbel
  // sampling with frozen noise) differentiated w.r.t. every model parameter,
  // k=4, T=3, d=5.
  NastConfig mc;
  mc.k = 4;
  mc.input_dim = 5;
  mc.global_dim = 3;
  mc.decoder_out_dim = 5;
  mc.predictor_blocks = 1;
  mc.attention_heads = 1;
  mc.conv_kernel = 3;
  mc.ffn_dim = 10;
  mc.seed = 12;
  NastModel model(mc);

  const FeatureSequence clean = random_seq(3, 5, 100);
  const FeatureSequence aug = random_seq(4, 5, 101);
  const Mat clean_mat = to_mat(clean.frames);
  const Mat aug_mat = to_mat(aug.frames);
  Mat noise(3, 4);
  Rng nrng(55);
  for (int64_t i = 0; i < noise.size(); ++i) noise.data()[i] = nrng.gumbel();
  const double tau = 0.9, lambda1 = 1.0, lambda2 = 0.005;

  auto loss_value = [&](bool with_grad, std::vector<Mat>* grads_out) {
    ag::Graph g;
    NastModel::Bound bound = model.bind(g, with_grad);
    ag::Node* xc = g.constant(clean_mat);
    ag::Node* logits_c = model.predictor_logits_node(g, bound, xc);
    ag::Node* y = g.gumbel_softmax(logits_c, noise, tau, false);
    ag::Node* u = model.global_embedding_node(g, bound, xc);
    ag::Node* decoded = model.decode_node(g, bound, y, u);
    ag::Node* recon = reconstruction_loss_node(g, decoded, clean_mat);
    ag::Node* diversity = diversity_loss_node(g, y);
    const Mat targets = ag::onehot_rows(ag::argmax_rows(y->value), mc.k);
    ag::Node* xa = g.constant(aug_mat);
    ag::Node* logits_a = model.predictor_logits_node(g, bound, xa);
    ag::Node* robust = robustness_loss_node(g, targets, logits_a, 3);
    ag::Node* total =
        g.add(recon, g.add(g.scale(diversity, lambda1), g.scale(robust, lambda2)));
    if (with_grad) {
      g.backward(total);
      grads_out->clear();
      for (ag::Node* n : bound.nodes) grads_out->push_back(n->grad);
    }
    return total->value(0, 0);
  };

  std::vector<Mat> grads;
  loss_value(true, &grads);

  double max_err = 0.0;
  for (size_t pi = 0; pi < model.num_params(); ++pi) {
    FloatMat& param = model.mutable_param(pi);
    for (size_t i = 0; i < param.data.size(); ++i) {
      const float orig = param.data[i];
      const double h = 1e-4 * std::max(1.0, std::abs(static_cast<double>(orig)));
      const float plus = static_cast<float>(static_cast<double>(orig) + h);
      const float minus = static_cast<float>(static_cast<double>(orig) - h);
      param.data[i] = plus;
      const double lp = loss_value(false, nullptr);
      param.data[i] = minus;
      const double lm = loss_value(false, nullptr);
      param.data[i] = orig;
      const double fd =
          (lp - lm) / (static_cast<double>(plus) - static_cast<double>(minus));
      max_err = std::max(max_err,
                         rel_err(grads[pi].data()[static_cast<int64_t>(i)], fd));
    }
  }
  CHECK(max_err < 1e-4);
}

TEST_CASE("identical seeds give identical loss trajectories") {
  NastConfig mc = small_model();
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.batch_size = 4;
  tc.max_steps = 10;
  tc.seed = 9;
  tc.augment_specs = {AugmentSpec::feature_noise(0.1, 0.3)};

  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 8; ++i) corpus.push_back(random_seq(6 + i % 3, 8, 200 + i));

  auto run = [&] {
    Trainer trainer(mc, tc);
    std::vector<LossBreakdown> history;
    for (int step = 0; step < 10; ++step) {
      std::vector<FeatureSequence> batch;
      for (int b = 0; b < 4; ++b) batch.push_back(corpus[(step * 4 + b) % corpus.size()]);
      history.push_back(trainer.train_step(batch));
    }
    return history;
  };
  const auto a = run();
  const auto b = run();
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].total == b[i].total);
    CHECK(a[i].recon == b[i].recon);
    CHECK(a[i].robust == b[i].robust);
    CHECK(a[i].diversity == b[i].diversity);
  }
}

TEST_CASE("minimal batch with a single frame completes") {
  NastConfig mc = small_model();
  TrainConfig tc;
  tc.batch_size = 1;
  tc.max_steps = 1;
  tc.seed = 1;
  Trainer trainer(mc, tc);
  std::vector<FeatureSequence> batch = {random_seq(1, 8, 42)};
  const LossBreakdown b = trainer.train_step(batch);
  CHECK(std::isfinite(b.total));
  CHECK(trainer.step() == 1);
}

TEST_CASE("reconstruction drops during an augmentation-free smoke run") {
  TempDir tmp("train_smoke");
  const auto manifest = synthesize_corpus(quick_corpus_spec(20, 77), tmp.path() / "corpus");

  NastConfig mc = small_model(8, 8, 3);
  mc.lambda1 = 0.0;
  mc.lambda2 = 0.0;
  TrainConfig tc;
  tc.learning_rate = 3e-3;
  tc.batch_size = 8;
  tc.max_steps = 200;
  tc.seed = 3;
  tc.augment_specs = {AugmentSpec::identity()};

  train_loop(mc, tc, manifest, tmp.path() / "run");
  const auto log = read_log(tmp.path() / "run" / "train_log.jsonl");
  REQUIRE(log.size() == 200);
  double initial = 0.0, final = 0.0;
  for (int i = 0; i < 10; ++i) {
    initial += log[static_cast<size_t>(i)]["recon"].get<double>();
    final += log[log.size() - 1 - static_cast<size_t>(i)]["recon"].get<double>();
  }
  initial /= 10.0;
  final /= 10.0;
  CHECK(final < 0.5 * initial);
  for (const auto& line : log) {
    const double total = line["total"].get<double>();
    CHECK(std::isfinite(total));
    CHECK(line["total"].get<double>() == doctest::Approx(line["recon"].get<double>()).epsilon(1e-9));
  }
}

TEST_CASE("checkpoint round-trip is bit-exact") {
  NastConfig mc = small_model();
  TrainConfig tc;
  tc.batch_size = 2;
  tc.seed = 4;
  tc.max_steps = 50;
  tc.augment_specs = {AugmentSpec::feature_noise(0.1, 0.2)};
  Trainer trainer(mc, tc);

  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(random_seq(5, 8, 300 + i));
  for (int step = 0; step < 6; ++step) {
    std::vector<FeatureSequence> batch = {corpus[static_cast<size_t>(step) % 4],
                                          corpus[static_cast<size_t>(step + 1) % 4]};
    trainer.train_step(batch);
  }

  TempDir tmp("ckpt_rt");
  const auto path = tmp.path() / "t.nastckpt";
  trainer.save_checkpoint(path);
  Trainer loaded = Trainer::load_checkpoint(path);

  CHECK(loaded.step() == trainer.step());

  SUBCASE("quantize outputs are identical on any input") {
    for (uint64_t seed : {400ULL, 401ULL, 402ULL}) {
      const FeatureSequence probe = random_seq(9, 8, seed);
      const UnitSequence a = trainer.model().quantize(probe);
      const UnitSequence b = loaded.model().quantize(probe);
      CHECK(a.units == b.units);
      // logits themselves are bit-identical
      const LogitSequence la = trainer.model().predict_logits(probe);
      const LogitSequence lb = loaded.model().predict_logits(probe);
      CHECK(la.logits.vec() == lb.logits.vec());
    }
  }

  SUBCASE("continued trajectories are identical") {
    for (int step = 0; step < 5; ++step) {
      std::vector<FeatureSequence> batch = {corpus[static_cast<size_t>(step) % 4],
                                            corpus[static_cast<size_t>(step + 2) % 4]};
      const LossBreakdown a = trainer.train_step(batch);
      const LossBreakdown b = loaded.train_step(batch);
      CHECK(a.total == b.total);
      CHECK(a.robust == b.robust);
    }
  }
}

TEST_CASE("checkpoint loading validates config and integrity") {
  NastConfig mc = small_model();
  TrainConfig tc;
  tc.seed = 8;
  Trainer trainer(mc, tc);
  TempDir tmp("ckpt_err");
  const auto path = tmp.path() / "t.nastckpt";
  trainer.save_checkpoint(path);

  SUBCASE("mismatched k") {
    NastConfig other = small_model(16, 8);
    CHECK_THROWS_WITH_AS(Trainer::load_checkpoint(path, &other), doctest::Contains("mismatch"),
                         ConfigError);
  }
  SUBCASE("matching config loads") {
    CHECK_NOTHROW(Trainer::load_checkpoint(path, &mc));
  }
  SUBCASE("truncated file") {
    auto bytes = testutil::read_text_file(path);
    bytes.resize(bytes.size() / 2);
    std::ofstream(path, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(Trainer::load_checkpoint(path), FormatError);
  }
}

TEST_CASE("train_loop with zero steps emits the initial checkpoint unchanged") {
  TempDir tmp("train_zero");
  const auto manifest = synthesize_corpus(quick_corpus_spec(6, 31), tmp.path() / "corpus");
  NastConfig mc = small_model(8, 8, 23);
  TrainConfig tc;
  tc.max_steps = 0;
  tc.seed = 23;
  const auto ckpt = train_loop(mc, tc, manifest, tmp.path() / "run");

  Trainer loaded = Trainer::load_checkpoint(ckpt);
  CHECK(loaded.step() == 0);
  const NastModel fresh(mc);
  const FeatureSequence probe = random_seq(7, 8, 999);
  CHECK(fresh.quantize(probe).units == loaded.model().quantize(probe).units);
}

TEST_CASE("resumed training reproduces the uninterrupted trajectory") {
  TempDir tmp("train_resume");
  const auto manifest = synthesize_corpus(quick_corpus_spec(10, 41), tmp.path() / "corpus");

  NastConfig mc = small_model(8, 8, 17);
  TrainConfig tc;
  tc.learning_rate = 1e-3;
  tc.batch_size = 4;
  tc.max_steps = 30;
  tc.checkpoint_every = 10;
  tc.seed = 17;
  tc.augment_specs = {AugmentSpec::feature_warp(0.8, 1.2), AugmentSpec::feature_noise(0.1, 0.3)};

  train_loop(mc, tc, manifest, tmp.path() / "full");
  const auto full_log = read_log(tmp.path() / "full" / "train_log.jsonl");
  REQUIRE(full_log.size() == 30);

  const auto ckpt20 = tmp.path() / "full" / "checkpoint_20.nastckpt";
  REQUIRE(std::filesystem::exists(ckpt20));
  train_loop(mc, tc, manifest, tmp.path() / "resumed", &ckpt20);
  const auto resumed_log = read_log(tmp.path() / "resumed" / "train_log.jsonl");
  REQUIRE(resumed_log.size() == 10);

  for (size_t i = 0; i < 10; ++i) {
    CHECK(resumed_log[i]["step"].get<int64_t>() == full_log[20 + i]["step"].get<int64_t>());
    CHECK(resumed_log[i]["total"].get<double>() == full_log[20 + i]["total"].get<double>());
    CHECK(resumed_log[i]["recon"].get<double>() == full_log[20 + i]["recon"].get<double>());
  }
}

TEST_CASE("train_loop rejects an empty corpus") {
  TempDir tmp("train_empty");
  std::ofstream(tmp.path() / "m.jsonl");
  NastConfig mc = small_model();
  TrainConfig tc;
  CHECK_THROWS_WITH_AS(train_loop(mc, tc, tmp.path() / "m.jsonl", tmp.path() / "run"),
                       doctest::Contains("empty corpus"), ValidationError);
}

TEST_CASE("raising lambda2 does not increase unit diversity") {
  // Matched seeded runs; the heavier robustness weight tends to concentrate
  // unit usage.
  TempDir tmp("train_lambda");
  const auto manifest = synthesize_corpus(quick_corpus_spec(40, 53), tmp.path() / "corpus");

  auto entropy_with_lambda2 = [&](double lambda2, const std::filesystem::path& dir) {
    NastConfig mc = small_model(8, 8, 29);
    mc.lambda2 = lambda2;
    mc.tau_decay_steps = 300;
    TrainConfig tc;
    tc.learning_rate = 1e-3;
    tc.batch_size = 8;
    tc.max_steps = 400;
    tc.seed = 29;
    tc.augment_specs = {AugmentSpec::feature_noise(0.1, 0.5)};
    const auto ckpt = train_loop(mc, tc, manifest, dir);
    Trainer trainer = Trainer::load_checkpoint(ckpt);
    const NastQuantizer q(trainer.model());
    const auto records = load_manifest(manifest);
    const auto units = tokenize_records(q, records, manifest.parent_path());
    return unit_usage_stats(units, 8).normalized_entropy;
  };

  const double high = entropy_with_lambda2(1.0, tmp.path() / "high");
  const double low = entropy_with_lambda2(0.005, tmp.path() / "low");
  CHECK(high <= low + 1e-9);
}

}  // TEST_SUITE
