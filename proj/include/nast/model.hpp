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

#ifndef NAST_MODEL_H_
#define NAST_MODEL_H_

#include <string>
#include <vector>

#include "nast/autograd.hpp"
#include "nast/featureio.hpp"
#include "nast/units.hpp"

namespace nast {

struct NastConfig {
  int64_t k = 100;             // unit count
  int64_t input_dim = 768;     // feature dim d
  int64_t global_dim = 256;    // residual-encoder projection d_g
  int64_t decoder_out_dim = 0;  // 0 -> input_dim
  int64_t predictor_blocks = 2;
  int64_t attention_heads = 4;
  int64_t conv_kernel = 31;
  int64_t ffn_dim = 0;  // 0 -> 4 * input_dim
  double tau_start = 2.0;
  double tau_end = 0.5;
  int64_t tau_decay_steps = 10000;
  double lambda1 = 1.0;
  double lambda2 = 0.005;
  uint64_t seed = 0;

  void validate() const;
  int64_t decoder_out() const { return decoder_out_dim > 0 ? decoder_out_dim : input_dim; }
  int64_t ffn() const { return ffn_dim > 0 ? ffn_dim : 4 * input_dim; }

  // Exponential decay from tau_start to tau_end over tau_decay_steps, then
  // constant at tau_end.
  double tau_at_step(int64_t step) const;

  std::string to_json() const;
  static NastConfig from_json(const std::string& text);
};

struct LogitSequence {
  Mat logits;  // T x k
  std::string utterance_id;
};

// Rows on the simplex (soft) or exact standard-basis vectors (hard).
struct OneHotSequence {
  Mat vectors;  // T x k
  bool hard = false;
};

struct GlobalEmbedding {
  std::vector<double> u;  // d_g
};

// The three networks. Parameters live in float32 (the checkpoint dtype) so
// save -> load -> quantize is reproducible bit for bit; all arithmetic runs
// in double.
class NastModel {
 public:
  explicit NastModel(const NastConfig& config);

  const NastConfig& config() const { return config_; }

  // --- parameter registry (checkpoint order) ---
  size_t num_params() const { return params_.size(); }
  const std::string& param_name(size_t i) const { return params_[i].name; }
  const FloatMat& param(size_t i) const { return params_[i].value; }
  FloatMat& mutable_param(size_t i) { return params_[i].value; }
  int64_t total_param_elements() const;
  // Overwrites parameters by name; every registered parameter must be present
  // with a matching shape.
  void set_params(const std::vector<std::pair<std::string, FloatMat>>& named);

  // --- graph builders (training path) ---
  struct Bound {
    std::vector<ag::Node*> nodes;  // parallel to the registry
  };
  Bound bind(ag::Graph& g, bool requires_grad) const;

  ag::Node* predictor_logits_node(ag::Graph& g, const Bound& bound, ag::Node* x) const;
  ag::Node* global_embedding_node(ag::Graph& g, const Bound& bound, ag::Node* x) const;  // 1 x d_g
  ag::Node* decode_node(ag::Graph& g, const Bound& bound, ag::Node* onehots, ag::Node* u) const;

  // --- inference ops ---
  LogitSequence predict_logits(const FeatureSequence& seq) const;
  GlobalEmbedding encode_global(const FeatureSequence& seq) const;
  Mat decode(const OneHotSequence& onehots, const GlobalEmbedding& u) const;
  UnitSequence quantize(const FeatureSequence& seq) const;

 private:
  struct LinearIdx {
    int w = -1, b = -1;
  };
  struct LayerNormIdx {
    int gamma = -1, beta = -1;
  };
  struct FfnIdx {
    LayerNormIdx ln;
    LinearIdx l1, l2;
  };
  struct AttnIdx {
    LayerNormIdx ln;
    LinearIdx q, k, v, o;
  };
  struct ConvIdx {
    LayerNormIdx ln;
    LinearIdx pw1;
    int dw = -1;
    LayerNormIdx ln2;
    LinearIdx pw2;
  };
  struct BlockIdx {
    FfnIdx ffn1;
    AttnIdx attn;
    ConvIdx conv;
    FfnIdx ffn2;
    LayerNormIdx final_ln;
  };

  struct ParamEntry {
    std::string name;
    FloatMat value;
  };

  int add_param(const std::string& name, int64_t rows, int64_t cols, double init_bound, Rng& rng);
  LinearIdx add_linear(const std::string& prefix, int64_t out, int64_t in, Rng& rng);
  LayerNormIdx add_layer_norm(const std::string& prefix, int64_t dim, Rng& rng);
  FfnIdx add_ffn(const std::string& prefix, int64_t dim, int64_t hidden, Rng& rng);

  ag::Node* apply_linear(ag::Graph& g, const Bound& b, const LinearIdx& idx, ag::Node* x) const;
  ag::Node* apply_layer_norm(ag::Graph& g, const Bound& b, const LayerNormIdx& idx, ag::Node* x) const;
  ag::Node* apply_ffn(ag::Graph& g, const Bound& b, const FfnIdx& idx, ag::Node* x) const;
  ag::Node* apply_attention(ag::Graph& g, const Bound& b, const AttnIdx& idx, ag::Node* x) const;
  ag::Node* apply_conv_module(ag::Graph& g, const Bound& b, const ConvIdx& idx, ag::Node* x) const;

  NastConfig config_;
  std::vector<ParamEntry> params_;

  std::vector<BlockIdx> blocks_;
  LinearIdx predictor_proj_;
  FfnIdx encoder_ffn_;
  LinearIdx encoder_proj_;
  LinearIdx decoder_l1_, decoder_l2_;
};

// Gumbel-Softmax sampling over per-frame logits. hard=true returns exact
// one-hot rows chosen by the (noisy) argmax.
OneHotSequence gumbel_sample(const LogitSequence& logits, double tau, Rng& rng, bool hard = false);

// Same computation with caller-provided noise; used by tests and gradient
// checks that need the noise frozen.
OneHotSequence gumbel_sample_with_noise(const LogitSequence& logits, double tau, const Mat& noise,
                                        bool hard = false);

}  // namespace nast

#endif  // NAST_MODEL_H_
