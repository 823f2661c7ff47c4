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

#ifndef NAST_LOSSES_H_
#define NAST_LOSSES_H_

#include "nast/autograd.hpp"
#include "nast/featureio.hpp"
#include "nast/model.hpp"

namespace nast {

struct LossBreakdown {
  double recon = 0.0;
  double robust = 0.0;
  double diversity = 0.0;
  double total = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

// Mean absolute difference over all T*d entries (per-frame L1 reduced by
// mean over the feature dims, then averaged over frames).
double reconstruction_loss(const Mat& decoded, const FeatureSequence& target);

// Linear interpolation of logit rows onto target_len rows.
Mat interpolate_logits(const Mat& aug_logits, int64_t target_len);

// Aligns the augmented logits to the clean length, softmaxes each row and
// sums the per-frame cross-entropy against the clean one-hot targets.
// frame_mean=true divides by T (the summed form is the default).
double robustness_loss(const OneHotSequence& clean_onehots, const Mat& aug_logits,
                       bool frame_mean = false);

// (1/k) * sum_i p_i ln p_i with p the average unit-selection rate; in
// [-ln(k)/k, 0], minimized at uniform usage.
double diversity_loss(const OneHotSequence& clean_onehots);

LossBreakdown total_loss(double recon, double diversity, double robust, double lambda1,
                         double lambda2);

// Graph-building forms used by the trainer (and by gradient checks).
ag::Node* reconstruction_loss_node(ag::Graph& g, ag::Node* decoded, const Mat& target);
ag::Node* robustness_loss_node(ag::Graph& g, const Mat& clean_hard_targets, ag::Node* aug_logits,
                               int64_t clean_len, bool frame_mean = false);
ag::Node* diversity_loss_node(ag::Graph& g, ag::Node* onehots);

}  // namespace nast

#endif  // NAST_LOSSES_H_
