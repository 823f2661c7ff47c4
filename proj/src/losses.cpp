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

#include "nast/losses.hpp"

#include <cmath>

namespace nast {

double reconstruction_loss(const Mat& decoded, const FeatureSequence& target) {
  if (decoded.rows() != target.frames.rows || decoded.cols() != target.frames.cols)
    throw ConfigError("reconstruction_loss: shape mismatch");
  ag::Graph g;
  ag::Node* pred = g.constant(decoded);
  return g.l1_mean(pred, to_mat(target.frames))->value(0, 0);
}

Mat interpolate_logits(const Mat& aug_logits, int64_t target_len) {
  return ag::interpolate_rows_value(aug_logits, target_len);
}

ag::Node* reconstruction_loss_node(ag::Graph& g, ag::Node* decoded, const Mat& target) {
  return g.l1_mean(decoded, target);
}

ag::Node* robustness_loss_node(ag::Graph& g, const Mat& clean_hard_targets, ag::Node* aug_logits,
                               int64_t clean_len, bool frame_mean) {
  if (aug_logits->value.cols() != clean_hard_targets.cols())
    throw ConfigError("robustness_loss: unit-count mismatch");
  if (clean_hard_targets.rows() != clean_len)
    throw ConfigError("robustness_loss: target length mismatch");
  ag::Node* aligned = g.interpolate_rows(aug_logits, clean_len);
  ag::Node* loss = g.ce_sum_rows(aligned, clean_hard_targets);
  if (frame_mean) loss = g.scale(loss, 1.0 / static_cast<double>(clean_len));
  return loss;
}

double robustness_loss(const OneHotSequence& clean_onehots, const Mat& aug_logits,
                       bool frame_mean) {
  ag::Graph g;
  ag::Node* logits = g.constant(aug_logits);
  return robustness_loss_node(g, clean_onehots.vectors, logits, clean_onehots.vectors.rows(),
                              frame_mean)
      ->value(0, 0);
}

ag::Node* diversity_loss_node(ag::Graph& g, ag::Node* onehots) {
  ag::Node* usage = g.mean_rows(onehots);
  ag::Node* plogp = g.plogp_sum(usage);
  return g.scale(plogp, 1.0 / static_cast<double>(onehots->value.cols()));
}

double diversity_loss(const OneHotSequence& clean_onehots) {
  ag::Graph g;
  ag::Node* oh = g.constant(clean_onehots.vectors);
  return diversity_loss_node(g, oh)->value(0, 0);
}

LossBreakdown total_loss(double recon, double diversity, double robust, double lambda1,
                         double lambda2) {
  if (!std::isfinite(recon) || !std::isfinite(diversity) || !std::isfinite(robust))
    throw NumericError("total_loss: non-finite term");
  LossBreakdown b;
  b.recon = recon;
  b.diversity = diversity;
  b.robust = robust;
  b.lambda1 = lambda1;
  b.lambda2 = lambda2;
  b.total = recon + lambda1 * diversity + lambda2 * robust;
  return b;
}

}  // namespace nast
