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

#ifndef NAST_TRAIN_H_
#define NAST_TRAIN_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "nast/augment.hpp"
#include "nast/losses.hpp"
#include "nast/model.hpp"

namespace nast {

struct TrainConfig {
  double learning_rate = 1e-4;
  int64_t batch_size = 16;
  int64_t max_steps = 1000;
  std::vector<AugmentSpec> augment_specs;  // empty -> identity
  int64_t checkpoint_every = 0;            // 0 = final only
  uint64_t seed = 0;

  bool hard_gumbel = false;         // straight-through instead of soft samples
  bool robust_frame_mean = false;   // per-frame mean variant of the summed loss
  bool compose_augmentations = false;  // apply the whole suite instead of one draw

  double grad_clip_norm = 5.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
  std::string to_json() const;
  static TrainConfig from_json(const std::string& text);
};

// Joint optimizer over the three networks. Parameters and Adam moments are
// float32-backed (checkpoint dtype); update arithmetic runs in double.
class Trainer {
 public:
  Trainer(const NastConfig& model_config, const TrainConfig& train_config);

  const NastModel& model() const { return model_; }
  const TrainConfig& train_config() const { return train_config_; }
  int64_t step() const { return step_; }
  double tau() const { return model_.config().tau_at_step(step_); }

  // One optimizer update over a batch of clean utterances. Augmented
  // counterparts are either supplied (paired by position; real-audio path)
  // or derived from the configured feature-level analogs.
  LossBreakdown train_step(const std::vector<FeatureSequence>& batch,
                           const std::vector<FeatureSequence>* augmented = nullptr);

  void save_checkpoint(const std::filesystem::path& path) const;
  static Trainer load_checkpoint(const std::filesystem::path& path,
                                 const NastConfig* expected = nullptr);

 private:
  NastModel model_;
  TrainConfig train_config_;
  std::vector<FloatMat> adam_m_;
  std::vector<FloatMat> adam_v_;
  int64_t step_ = 0;
  int64_t adam_t_ = 0;
  Rng rng_{0};

  void init_moments();
  void apply_update(const std::vector<Mat>& grads);
};

// Trains over a manifest and returns the final checkpoint path. Writes
// checkpoint_<step>.nastckpt at the configured cadence, checkpoint_final.nastckpt,
// and train_log.jsonl (one JSON object per step: step, recon, robust,
// diversity, total, tau). aug_manifest pairs precomputed augmented features
// by utterance id.
std::filesystem::path train_loop(const NastConfig& model_config, const TrainConfig& train_config,
                                 const std::filesystem::path& manifest,
                                 const std::filesystem::path& out_dir,
                                 const std::filesystem::path* resume_from = nullptr,
                                 const std::filesystem::path* aug_manifest = nullptr);

}  // namespace nast

#endif  // NAST_TRAIN_H_
