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

#include "nast/presets.hpp"

namespace nast {

DeskPreset preset_desk() {
  DeskPreset p;

  p.synth.num_utterances = 200;
  p.synth.num_phonemes = 8;
  p.synth.num_speakers = 2;
  p.synth.feature_dim = 16;
  p.synth.mean_duration_frames = 5.0;
  p.synth.prototype_scale = 1.0;
  p.synth.noise_scale = 0.1;
  p.synth.speaker_offset_scale = 0.5;
  p.synth.seed = 7;

  p.model.k = 8;
  p.model.input_dim = 16;
  p.model.global_dim = 32;
  p.model.decoder_out_dim = 16;
  p.model.predictor_blocks = 2;
  p.model.attention_heads = 4;
  p.model.conv_kernel = 15;
  p.model.ffn_dim = 64;
  p.model.tau_start = 2.0;
  p.model.tau_end = 0.5;
  p.model.tau_decay_steps = 1500;
  p.model.lambda1 = 1.0;
  p.model.lambda2 = 0.005;
  p.model.seed = 7;

  p.train.learning_rate = 1e-3;  // desk-scale rate; the paper-scale default stays 1e-4
  p.train.batch_size = 16;
  p.train.max_steps = 2000;
  p.train.seed = 7;
  p.train.checkpoint_every = 0;
  p.train.augment_specs = {AugmentSpec::feature_warp(0.8, 1.2),
                           AugmentSpec::feature_noise(0.1, 0.5)};
  return p;
}

}  // namespace nast
