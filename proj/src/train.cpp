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

#include "nast/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "nast/checkpoint.hpp"

namespace nast {

using json = nlohmann::json;
namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("train config: learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
  if (max_steps < 0) throw ConfigError("train config: max_steps must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("train config: checkpoint_every must be >= 0");
  if (grad_clip_norm < 0.0) throw ConfigError("train config: grad_clip_norm must be >= 0");
  for (const auto& spec : augment_specs) spec.validate();
}

std::string TrainConfig::to_json() const {
  json j;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["max_steps"] = max_steps;
  j["checkpoint_every"] = checkpoint_every;
  j["seed"] = seed;
  j["hard_gumbel"] = hard_gumbel;
  j["robust_frame_mean"] = robust_frame_mean;
  j["compose_augmentations"] = compose_augmentations;
  j["grad_clip_norm"] = grad_clip_norm;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  json specs = json::array();
  for (const auto& s : augment_specs) {
    json sj;
    sj["kind"] = augment_kind_name(s.kind);
    sj["lo"] = s.lo;
    sj["hi"] = s.hi;
    if (!s.path.empty()) sj["path"] = s.path;
    specs.push_back(sj);
  }
  j["augment_specs"] = specs;
  return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("train config json: ") + e.what());
  }
  TrainConfig c;
  try {
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<int64_t>();
    c.max_steps = j.at("max_steps").get<int64_t>();
    c.checkpoint_every = j.at("checkpoint_every").get<int64_t>();
    c.seed = j.at("seed").get<uint64_t>();
    c.hard_gumbel = j.at("hard_gumbel").get<bool>();
    c.robust_frame_mean = j.at("robust_frame_mean").get<bool>();
    c.compose_augmentations = j.at("compose_augmentations").get<bool>();
    c.grad_clip_norm = j.at("grad_clip_norm").get<double>();
    c.adam_beta1 = j.at("adam_beta1").get<double>();
    c.adam_beta2 = j.at("adam_beta2").get<double>();
    c.adam_eps = j.at("adam_eps").get<double>();
    for (const auto& sj : j.at("augment_specs")) {
      AugmentSpec s;
      s.kind = augment_kind_from_name(sj.at("kind").get<std::string>());
      s.lo = sj.at("lo").get<double>();
      s.hi = sj.at("hi").get<double>();
      if (sj.contains("path")) s.path = sj.at("path").get<std::string>();
      c.augment_specs.push_back(s);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("train config json: ") + e.what());
  }
  c.validate();
  return c;
}

Trainer::Trainer(const NastConfig& model_config, const TrainConfig& train_config)
    : model_(model_config), train_config_(train_config), rng_(train_config.seed) {
  train_config_.validate();
  init_moments();
}

void Trainer::init_moments() {
  adam_m_.clear();
  adam_v_.clear();
  for (size_t i = 0; i < model_.num_params(); ++i) {
    const auto& p = model_.param(i);
    adam_m_.emplace_back(p.rows, p.cols);
    adam_v_.emplace_back(p.rows, p.cols);
  }
}

void Trainer::apply_update(const std::vector<Mat>& grads) {
  // Global-norm clip ahead of the moment updates.
  double sq = 0.0;
  for (const auto& g : grads)
    for (int64_t i = 0; i < g.size(); ++i) sq += g.data()[i] * g.data()[i];
  const double norm = std::sqrt(sq);
  const double clip = train_config_.grad_clip_norm;
  const double gscale = (clip > 0.0 && norm > clip) ? clip / norm : 1.0;

  ++adam_t_;
  const double b1 = train_config_.adam_beta1;
  const double b2 = train_config_.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
  const double lr = train_config_.learning_rate;
  const double eps = train_config_.adam_eps;

  for (size_t pi = 0; pi < grads.size(); ++pi) {
    FloatMat& param = model_.mutable_param(pi);
    FloatMat& m = adam_m_[pi];
    FloatMat& v = adam_v_[pi];
    for (int64_t i = 0; i < grads[pi].size(); ++i) {
      const double g = grads[pi].data()[i] * gscale;
      const double mi = b1 * static_cast<double>(m.data[static_cast<size_t>(i)]) + (1.0 - b1) * g;
      const double vi = b2 * static_cast<double>(v.data[static_cast<size_t>(i)]) + (1.0 - b2) * g * g;
      m.data[static_cast<size_t>(i)] = static_cast<float>(mi);
      v.data[static_cast<size_t>(i)] = static_cast<float>(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      const double updated = static_cast<double>(param.data[static_cast<size_t>(i)]) -
                             lr * mhat / (std::sqrt(vhat) + eps);
      param.data[static_cast<size_t>(i)] = static_cast<float>(updated);
    }
  }
}

LossBreakdown Trainer::train_step(const std::vector<FeatureSequence>& batch,
                                  const std::vector<FeatureSequence>* augmented) {
  if (batch.empty()) throw ValidationError("train_step: empty batch");
  if (augmented && augmented->size() != batch.size())
    throw ValidationError("train_step: augmented batch size mismatch");

  const NastConfig& mc = model_.config();
  const double tau = mc.tau_at_step(step_);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  std::vector<AugmentSpec> specs = train_config_.augment_specs;
  if (specs.empty()) specs.push_back(AugmentSpec::identity());

  ag::Graph g;
  NastModel::Bound bound = model_.bind(g, true);

  ag::Node* total = nullptr;
  double recon_sum = 0.0, robust_sum = 0.0, diversity_sum = 0.0;

  for (size_t bi = 0; bi < batch.size(); ++bi) {
    const FeatureSequence& clean = batch[bi];
    if (clean.dim() != mc.input_dim)
      throw ConfigError("train_step: utterance '" + clean.utterance_id + "' has dim " +
                        std::to_string(clean.dim()) + ", model expects " +
                        std::to_string(mc.input_dim));

    FeatureSequence aug;
    if (augmented) {
      aug = (*augmented)[bi];
    } else if (train_config_.compose_augmentations) {
      aug = clean;
      for (const auto& spec : specs) aug = apply_feature_augment(aug, spec, rng_);
    } else {
      const AugmentSpec spec = sample_augmentation(specs, rng_);
      aug = apply_feature_augment(clean, spec, rng_);
    }

    const Mat clean_mat = to_mat(clean.frames);
    const int64_t t = clean_mat.rows();

    ag::Node* xc = g.constant(clean_mat);
    ag::Node* logits_c = model_.predictor_logits_node(g, bound, xc);

    Mat noise(t, mc.k);
    for (int64_t i = 0; i < noise.size(); ++i) noise.data()[i] = rng_.gumbel();
    ag::Node* onehots = g.gumbel_softmax(logits_c, noise, tau, train_config_.hard_gumbel);

    ag::Node* u = model_.global_embedding_node(g, bound, xc);
    ag::Node* decoded = model_.decode_node(g, bound, onehots, u);
    ag::Node* recon = reconstruction_loss_node(g, decoded, clean_mat);
    ag::Node* diversity = diversity_loss_node(g, onehots);

    // Hard targets from the clean Gumbel sample; constants in the graph so
    // no gradient reaches the clean path through the robustness term.
    Mat targets = ag::onehot_rows(ag::argmax_rows(onehots->value), mc.k);

    ag::Node* xa = g.constant(to_mat(aug.frames));
    ag::Node* logits_a = model_.predictor_logits_node(g, bound, xa);
    ag::Node* robust =
        robustness_loss_node(g, targets, logits_a, t, train_config_.robust_frame_mean);

    ag::Node* utt_total =
        g.add(recon, g.add(g.scale(diversity, mc.lambda1), g.scale(robust, mc.lambda2)));
    total = total == nullptr ? utt_total : g.add(total, utt_total);

    recon_sum += recon->value(0, 0);
    robust_sum += robust->value(0, 0);
    diversity_sum += diversity->value(0, 0);
  }

  total = g.scale(total, inv_batch);

  LossBreakdown breakdown = total_loss(recon_sum * inv_batch, diversity_sum * inv_batch,
                                       robust_sum * inv_batch, mc.lambda1, mc.lambda2);
  const char* bad_term = nullptr;
  if (!std::isfinite(breakdown.recon)) bad_term = "recon";
  else if (!std::isfinite(breakdown.diversity)) bad_term = "diversity";
  else if (!std::isfinite(breakdown.robust)) bad_term = "robust";
  else if (!std::isfinite(breakdown.total)) bad_term = "total";
  if (bad_term)
    throw NumericError("non-finite " + std::string(bad_term) + " loss at step " +
                       std::to_string(step_ + 1));

  g.backward(total);

  std::vector<Mat> grads;
  grads.reserve(bound.nodes.size());
  for (ag::Node* n : bound.nodes) grads.push_back(n->grad);
  apply_update(grads);

  ++step_;
  return breakdown;
}

void Trainer::save_checkpoint(const fs::path& path) const {
  Container c;
  json j;
  j["format"] = "nast-checkpoint";
  j["toolkit_version"] = kVersion;
  j["config"] = json::parse(model_.config().to_json());
  j["train_config"] = json::parse(train_config_.to_json());
  j["step"] = step_;
  j["adam_t"] = adam_t_;
  j["tau"] = model_.config().tau_at_step(step_);
  j["rng"] = rng_.serialize_state();
  c.json_text = j.dump();

  for (size_t i = 0; i < model_.num_params(); ++i) {
    c.tensors.emplace_back(model_.param_name(i), model_.param(i));
    c.tensors.emplace_back("adam.m." + model_.param_name(i), adam_m_[i]);
    c.tensors.emplace_back("adam.v." + model_.param_name(i), adam_v_[i]);
  }
  write_container(path, kCheckpointMagic, c);
}

Trainer Trainer::load_checkpoint(const fs::path& path, const NastConfig* expected) {
  Container c = read_container(path, kCheckpointMagic);
  json j;
  try {
    j = json::parse(c.json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint json: ") + e.what());
  }
  if (!j.contains("format") || j["format"] != "nast-checkpoint")
    throw FormatError("not a nast checkpoint: " + path.string());

  NastConfig config = NastConfig::from_json(j.at("config").dump());
  if (expected) {
    const NastConfig& e = *expected;
    if (config.k != e.k || config.input_dim != e.input_dim || config.global_dim != e.global_dim ||
        config.decoder_out() != e.decoder_out() || config.predictor_blocks != e.predictor_blocks ||
        config.attention_heads != e.attention_heads || config.conv_kernel != e.conv_kernel ||
        config.ffn() != e.ffn())
      throw ConfigError("checkpoint architecture mismatch (k=" + std::to_string(config.k) +
                        " dim=" + std::to_string(config.input_dim) + " vs expected k=" +
                        std::to_string(e.k) + " dim=" + std::to_string(e.input_dim) + ")");
  }
  TrainConfig tc = TrainConfig::from_json(j.at("train_config").dump());

  Trainer trainer(config, tc);
  std::vector<std::pair<std::string, FloatMat>> params;
  std::unordered_map<std::string, FloatMat> moments;
  for (auto& [name, value] : c.tensors) {
    if (name.rfind("adam.", 0) == 0) {
      moments.emplace(name, std::move(value));
    } else {
      params.emplace_back(name, std::move(value));
    }
  }
  trainer.model_.set_params(params);
  for (size_t i = 0; i < trainer.model_.num_params(); ++i) {
    const std::string& pname = trainer.model_.param_name(i);
    auto mi = moments.find("adam.m." + pname);
    auto vi = moments.find("adam.v." + pname);
    if (mi == moments.end() || vi == moments.end())
      throw ConfigError("checkpoint is missing optimizer moments for '" + pname + "'");
    trainer.adam_m_[i] = mi->second;
    trainer.adam_v_[i] = vi->second;
  }

  try {
    trainer.step_ = j.at("step").get<int64_t>();
    trainer.adam_t_ = j.at("adam_t").get<int64_t>();
    trainer.rng_.restore_state(j.at("rng").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint json: ") + e.what());
  }
  return trainer;
}

namespace {

// Epoch ordering is a pure function of (seed, epoch) so interrupted and
// resumed runs walk the same utterance sequence.
std::vector<size_t> epoch_permutation(uint64_t seed, int64_t epoch, size_t n) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(epoch) + 1);
  for (size_t i = n; i > 1; --i) {
    const size_t jdx = rng.uniform_index(i);
    std::swap(perm[i - 1], perm[jdx]);
  }
  return perm;
}

}  // namespace

fs::path train_loop(const NastConfig& model_config, const TrainConfig& train_config,
                    const fs::path& manifest, const fs::path& out_dir,
                    const fs::path* resume_from, const fs::path* aug_manifest) {
  model_config.validate();
  train_config.validate();

  const std::vector<UtteranceRecord> records = load_manifest(manifest, /*validate=*/true);
  if (records.empty()) throw ValidationError("empty corpus: " + manifest.string());
  const fs::path manifest_dir = manifest.parent_path();

  std::vector<FeatureSequence> corpus;
  corpus.reserve(records.size());
  for (const auto& rec : records) {
    FeatureSequence seq = load_record_features(rec, manifest_dir);
    if (seq.dim() != model_config.input_dim)
      throw ConfigError("utterance '" + rec.utterance_id + "' has dim " +
                        std::to_string(seq.dim()) + ", model expects " +
                        std::to_string(model_config.input_dim));
    corpus.push_back(std::move(seq));
  }

  // Optional precomputed augmented features, paired by utterance id.
  std::vector<FeatureSequence> aug_corpus;
  if (aug_manifest) {
    const std::vector<UtteranceRecord> aug_records = load_manifest(*aug_manifest, true);
    std::unordered_map<std::string, const UtteranceRecord*> by_id;
    for (const auto& rec : aug_records) by_id[rec.utterance_id] = &rec;
    const fs::path aug_dir = aug_manifest->parent_path();
    for (const auto& rec : records) {
      auto it = by_id.find(rec.utterance_id);
      if (it == by_id.end())
        throw ValidationError("augmented manifest is missing utterance '" + rec.utterance_id + "'");
      aug_corpus.push_back(load_record_features(*it->second, aug_dir));
    }
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);

  Trainer trainer = resume_from ? Trainer::load_checkpoint(*resume_from, &model_config)
                                : Trainer(model_config, train_config);

  std::ofstream log(out_dir / "train_log.jsonl");
  if (!log) throw IoError("cannot open training log in " + out_dir.string());

  const size_t n = corpus.size();
  const int64_t batch = train_config.batch_size;
  std::vector<size_t> perm;
  int64_t perm_epoch = -1;

  while (trainer.step() < train_config.max_steps) {
    std::vector<FeatureSequence> clean_batch;
    std::vector<FeatureSequence> aug_batch;
    clean_batch.reserve(static_cast<size_t>(batch));
    for (int64_t bi = 0; bi < batch; ++bi) {
      const int64_t pos = trainer.step() * batch + bi;
      const int64_t epoch = pos / static_cast<int64_t>(n);
      if (epoch != perm_epoch) {
        perm = epoch_permutation(train_config.seed, epoch, n);
        perm_epoch = epoch;
      }
      const size_t idx = perm[static_cast<size_t>(pos % static_cast<int64_t>(n))];
      clean_batch.push_back(corpus[idx]);
      if (!aug_corpus.empty()) aug_batch.push_back(aug_corpus[idx]);
    }

    const double tau = trainer.tau();
    LossBreakdown b = trainer.train_step(clean_batch, aug_corpus.empty() ? nullptr : &aug_batch);

    nlohmann::json line;
    line["step"] = trainer.step();
    line["recon"] = b.recon;
    line["robust"] = b.robust;
    line["diversity"] = b.diversity;
    line["total"] = b.total;
    line["tau"] = tau;
    log << line.dump() << "\n";

    if (train_config.checkpoint_every > 0 && trainer.step() % train_config.checkpoint_every == 0) {
      trainer.save_checkpoint(out_dir /
                              ("checkpoint_" + std::to_string(trainer.step()) + ".nastckpt"));
    }
  }
  log.flush();

  const fs::path final_path = out_dir / "checkpoint_final.nastckpt";
  trainer.save_checkpoint(final_path);
  return final_path;
}

}  // namespace nast
