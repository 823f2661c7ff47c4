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

#ifndef NAST_PRESETS_H_
#define NAST_PRESETS_H_

#include "nast/featureio.hpp"
#include "nast/model.hpp"
#include "nast/train.hpp"

namespace nast {

struct DeskPreset {
  SyntheticSpec synth;
  NastConfig model;
  TrainConfig train;
};

// The fixed desk-scale configuration: 8 phonemes, 2 speakers, 200 utterances,
// d=16, k=8, 2000 steps, seed 7. Trains in minutes on one CPU core.
DeskPreset preset_desk();

}  // namespace nast

#endif  // NAST_PRESETS_H_
