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

#include "nast/model.hpp"

#include <cmath>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace nast {

using json = nlohmann::json;

void NastConfig::validate() const {
  if (k < 2) throw ConfigError("config: k must be >= 2");
  if (input_dim < 1 || global_dim < 1) throw ConfigError("config: dims must be >= 1");
  if (decoder_out_dim < 0 || ffn_dim < 0) throw ConfigError("config: dims must be >= 0");
  if (predictor_blocks < 1) throw ConfigError("config: predictor_blocks must be >= 1");
  if (attention_heads < 1 || input_dim % attention_heads != 0)
    throw ConfigError("config: attention_heads must divide input_dim");
  if (conv_kernel < 1 || conv_kernel % 2 == 0)
    throw ConfigError("config: conv_kernel must be odd and >= 1");
  if (tau_start <= 0.0 || tau_end <= 0.0 || tau_end > tau_start)
    throw ConfigError("config: need 0 < tau_end <= tau_start");
  if (tau_decay_steps < 1) throw ConfigError("config: tau_decay_steps must be >= 1");
  if (lambda1 < 0.0 || lambda2 < 0.0) throw ConfigError("config: lambdas must be >= 0");
}

double NastConfig::tau_at_step(int64_t step) const {
  if (step < 0) step = 0;
  const double rate = std::log(tau_start / tau_end) / static_cast<double>(tau_decay_steps);
  const double tau = tau_start * std::exp(-static_cast<double>(step) * rate);
  return std::max(tau_end, tau);
}

std::string NastConfig::to_json() const {
  json j;
  j["k"] = k;
  j["input_dim"] = input_dim;
  j["global_dim"] = global_dim;
  j["decoder_out_dim"] = decoder_out_dim;
  j["predictor_blocks"] = predictor_blocks;
  j["attention_heads"] = attention_heads;
  j["conv_kernel"] = conv_kernel;
  j["ffn_dim"] = ffn_dim;
  j["tau_start"] = tau_start;
  j["tau_end"] = tau_end;
  j["tau_decay_steps"] = tau_decay_steps;
  j["lambda1"] = lambda1;
  j["lambda2"] = lambda2;
  j["seed"] = seed;
  return j.dump();
}

NastConfig NastConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config json: ") + e.what());
  }
  NastConfig c;
  try {
    c.k = j.at("k").get<int64_t>();
    c.input_dim = j.at("input_dim").get<int64_t>();
    c.global_dim = j.at("global_dim").get<int64_t>();
    c.decoder_out_dim = j.at("decoder_out_dim").get<int64_t>();
    c.predictor_blocks = j.at("predictor_blocks").get<int64_t>();
    c.attention_heads = j.at("attention_heads").get<int64_t>();
    c.conv_kernel = j.at("conv_kernel").get<int64_t>();
    c.ffn_dim = j.at("ffn_dim").get<int64_t>();
    c.tau_start = j.at("tau_start").get<double>();
    c.tau_end = j.at("tau_end").get<double>();
    c.tau_decay_steps = j.at("tau_decay_steps").get<int64_t>();
    c.lambda1 = j.at("lambda1").get<double>();
    c.lambda2 = j.at("lambda2").get<double>();
    c.seed = j.at("seed").get<uint64_t>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config json: ") + e.what());
  }
  c.validate();
  return c;
}

int NastModel::add_param(const std::string& name, int64_t rows, int64_t cols, double init_bound,
                         Rng& rng) {
  ParamEntry entry;
  entry.name = name;
  entry.value = FloatMat(rows, cols);
  if (init_bound > 0.0) {
    for (auto& v : entry.value.data)
      v = static_cast<float>(rng.uniform(-init_bound, init_bound));
  }
  params_.push_back(std::move(entry));
  return static_cast<int>(params_.size()) - 1;
}

NastModel::LinearIdx NastModel::add_linear(const std::string& prefix, int64_t out, int64_t in,
                                           Rng& rng) {
  LinearIdx idx;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  idx.w = add_param(prefix + ".weight", out, in, bound, rng);
  idx.b = add_param(prefix + ".bias", 1, out, 0.0, rng);
  return idx;
}

NastModel::LayerNormIdx NastModel::add_layer_norm(const std::string& prefix, int64_t dim, Rng& rng) {
  LayerNormIdx idx;
  idx.gamma = add_param(prefix + ".gamma", 1, dim, 0.0, rng);
  idx.beta = add_param(prefix + ".beta", 1, dim, 0.0, rng);
  for (auto& v : params_[static_cast<size_t>(idx.gamma)].value.data) v = 1.0f;
  return idx;
}

NastModel::FfnIdx NastModel::add_ffn(const std::string& prefix, int64_t dim, int64_t hidden,
                                     Rng& rng) {
  FfnIdx idx;
  idx.ln = add_layer_norm(prefix + ".ln", dim, rng);
  idx.l1 = add_linear(prefix + ".l1", hidden, dim, rng);
  idx.l2 = add_linear(prefix + ".l2", dim, hidden, rng);
  return idx;
}

NastModel::NastModel(const NastConfig& config) : config_(config) {
  config_.validate();
  Rng rng(config_.seed);
  const int64_t d = config_.input_dim;

  for (int64_t bi = 0; bi < config_.predictor_blocks; ++bi) {
    const std::string p = "predictor.block" + std::to_string(bi);
    BlockIdx block;
    block.ffn1 = add_ffn(p + ".ffn1", d, config_.ffn(), rng);
    block.attn.ln = add_layer_norm(p + ".attn.ln", d, rng);
    block.attn.q = add_linear(p + ".attn.q", d, d, rng);
    block.attn.k = add_linear(p + ".attn.k", d, d, rng);
    block.attn.v = add_linear(p + ".attn.v", d, d, rng);
    block.attn.o = add_linear(p + ".attn.o", d, d, rng);
    block.conv.ln = add_layer_norm(p + ".conv.ln", d, rng);
    block.conv.pw1 = add_linear(p + ".conv.pw1", 2 * d, d, rng);
    block.conv.dw = add_param(p + ".conv.dw.kernel", d, config_.conv_kernel,
                              1.0 / std::sqrt(static_cast<double>(config_.conv_kernel)), rng);
    block.conv.ln2 = add_layer_norm(p + ".conv.ln2", d, rng);
    block.conv.pw2 = add_linear(p + ".conv.pw2", d, d, rng);
    block.ffn2 = add_ffn(p + ".ffn2", d, config_.ffn(), rng);
    block.final_ln = add_layer_norm(p + ".final_ln", d, rng);
    blocks_.push_back(block);
  }
  predictor_proj_ = add_linear("predictor.proj", config_.k, d, rng);

  // The residual encoder is frame-local: its temporal mean is then exactly
  // invariant to frame permutations.
  encoder_ffn_ = add_ffn("encoder.ffn", d, 2 * d, rng);
  encoder_proj_ = add_linear("encoder.proj", config_.global_dim, d, rng);

  const int64_t dec_out = config_.decoder_out();
  decoder_l1_ = add_linear("decoder.l1", 2 * dec_out, config_.k + config_.global_dim, rng);
  decoder_l2_ = add_linear("decoder.l2", dec_out, 2 * dec_out, rng);
}

int64_t NastModel::total_param_elements() const {
  int64_t total = 0;
  for (const auto& p : params_) total += p.value.rows * p.value.cols;
  return total;
}

void NastModel::set_params(const std::vector<std::pair<std::string, FloatMat>>& named) {
  std::unordered_map<std::string, const FloatMat*> lookup;
  for (const auto& [name, value] : named) lookup[name] = &value;
  for (auto& entry : params_) {
    auto it = lookup.find(entry.name);
    if (it == lookup.end())
      throw ConfigError("checkpoint is missing parameter '" + entry.name + "'");
    if (it->second->rows != entry.value.rows || it->second->cols != entry.value.cols)
      throw ConfigError("checkpoint parameter '" + entry.name + "' has shape " +
                        std::to_string(it->second->rows) + "x" + std::to_string(it->second->cols) +
                        ", expected " + std::to_string(entry.value.rows) + "x" +
                        std::to_string(entry.value.cols));
    entry.value = *it->second;
  }
}

NastModel::Bound NastModel::bind(ag::Graph& g, bool requires_grad) const {
  Bound bound;
  bound.nodes.reserve(params_.size());
  for (const auto& entry : params_) bound.nodes.push_back(g.leaf(to_mat(entry.value), requires_grad));
  return bound;
}

ag::Node* NastModel::apply_linear(ag::Graph& g, const Bound& b, const LinearIdx& idx,
                                  ag::Node* x) const {
  return g.linear(x, b.nodes[static_cast<size_t>(idx.w)], b.nodes[static_cast<size_t>(idx.b)]);
}

ag::Node* NastModel::apply_layer_norm(ag::Graph& g, const Bound& b, const LayerNormIdx& idx,
                                      ag::Node* x) const {
  return g.layer_norm(x, b.nodes[static_cast<size_t>(idx.gamma)],
                      b.nodes[static_cast<size_t>(idx.beta)]);
}

ag::Node* NastModel::apply_ffn(ag::Graph& g, const Bound& b, const FfnIdx& idx, ag::Node* x) const {
  ag::Node* h = apply_layer_norm(g, b, idx.ln, x);
  h = apply_linear(g, b, idx.l1, h);
  h = g.silu(h);
  return apply_linear(g, b, idx.l2, h);
}

ag::Node* NastModel::apply_attention(ag::Graph& g, const Bound& b, const AttnIdx& idx,
                                     ag::Node* x) const {
  const int64_t d = config_.input_dim;
  const int64_t heads = config_.attention_heads;
  const int64_t dh = d / heads;

  ag::Node* h = apply_layer_norm(g, b, idx.ln, x);
  ag::Node* q = apply_linear(g, b, idx.q, h);
  ag::Node* k = apply_linear(g, b, idx.k, h);
  ag::Node* v = apply_linear(g, b, idx.v, h);

  ag::Node* merged = nullptr;
  for (int64_t head = 0; head < heads; ++head) {
    ag::Node* qh = g.slice_cols(q, head * dh, dh);
    ag::Node* kh = g.slice_cols(k, head * dh, dh);
    ag::Node* vh = g.slice_cols(v, head * dh, dh);
    ag::Node* scores = g.scale(g.matmul_nt(qh, kh), 1.0 / std::sqrt(static_cast<double>(dh)));
    ag::Node* attn = g.softmax_rows(scores);
    ag::Node* out = g.matmul(attn, vh);
    merged = merged == nullptr ? out : g.concat_cols(merged, out);
  }
  return apply_linear(g, b, idx.o, merged);
}

ag::Node* NastModel::apply_conv_module(ag::Graph& g, const Bound& b, const ConvIdx& idx,
                                       ag::Node* x) const {
  ag::Node* h = apply_layer_norm(g, b, idx.ln, x);
  h = apply_linear(g, b, idx.pw1, h);
  h = g.glu_cols(h);
  h = g.depthwise_conv1d(h, b.nodes[static_cast<size_t>(idx.dw)]);
  h = apply_layer_norm(g, b, idx.ln2, h);
  h = g.silu(h);
  return apply_linear(g, b, idx.pw2, h);
}

ag::Node* NastModel::predictor_logits_node(ag::Graph& g, const Bound& b, ag::Node* x) const {
  if (x->value.cols() != config_.input_dim)
    throw ConfigError("predictor: feature dim " + std::to_string(x->value.cols()) +
                      " != configured input_dim " + std::to_string(config_.input_dim));
  ag::Node* h = x;
  for (const auto& block : blocks_) {
    h = g.add(h, g.scale(apply_ffn(g, b, block.ffn1, h), 0.5));
    h = g.add(h, apply_attention(g, b, block.attn, h));
    h = g.add(h, apply_conv_module(g, b, block.conv, h));
    h = g.add(h, g.scale(apply_ffn(g, b, block.ffn2, h), 0.5));
    h = apply_layer_norm(g, b, block.final_ln, h);
  }
  return apply_linear(g, b, predictor_proj_, h);
}

ag::Node* NastModel::global_embedding_node(ag::Graph& g, const Bound& b, ag::Node* x) const {
  if (x->value.cols() != config_.input_dim)
    throw ConfigError("residual encoder: feature dim " + std::to_string(x->value.cols()) +
                      " != configured input_dim " + std::to_string(config_.input_dim));
  ag::Node* h = g.add(x, apply_ffn(g, b, encoder_ffn_, x));
  h = apply_linear(g, b, encoder_proj_, h);
  return g.mean_rows(h);
}

ag::Node* NastModel::decode_node(ag::Graph& g, const Bound& b, ag::Node* onehots,
                                 ag::Node* u) const {
  if (onehots->value.cols() != config_.k)
    throw ConfigError("decoder: one-hot width " + std::to_string(onehots->value.cols()) +
                      " != configured k " + std::to_string(config_.k));
  if (u->value.cols() != config_.global_dim)
    throw ConfigError("decoder: global width " + std::to_string(u->value.cols()) +
                      " != configured global_dim " + std::to_string(config_.global_dim));
  ag::Node* u_rows = g.repeat_row(u, onehots->value.rows());
  ag::Node* z = g.concat_cols(onehots, u_rows);
  ag::Node* h = g.silu(apply_linear(g, b, decoder_l1_, z));
  return apply_linear(g, b, decoder_l2_, h);
}

LogitSequence NastModel::predict_logits(const FeatureSequence& seq) const {
  ag::Graph g;
  Bound bound = bind(g, false);
  ag::Node* x = g.constant(to_mat(seq.frames));
  ag::Node* logits = predictor_logits_node(g, bound, x);
  LogitSequence out;
  out.logits = logits->value;
  out.utterance_id = seq.utterance_id;
  return out;
}

GlobalEmbedding NastModel::encode_global(const FeatureSequence& seq) const {
  ag::Graph g;
  Bound bound = bind(g, false);
  ag::Node* x = g.constant(to_mat(seq.frames));
  ag::Node* u = global_embedding_node(g, bound, x);
  GlobalEmbedding out;
  out.u.assign(u->value.data(), u->value.data() + u->value.size());
  return out;
}

Mat NastModel::decode(const OneHotSequence& onehots, const GlobalEmbedding& u) const {
  ag::Graph g;
  Bound bound = bind(g, false);
  ag::Node* oh = g.constant(onehots.vectors);
  Mat urow(1, static_cast<int64_t>(u.u.size()));
  for (size_t i = 0; i < u.u.size(); ++i) urow(0, static_cast<int64_t>(i)) = u.u[i];
  ag::Node* un = g.constant(urow);
  return decode_node(g, bound, oh, un)->value;
}

UnitSequence NastModel::quantize(const FeatureSequence& seq) const {
  LogitSequence logits = predict_logits(seq);
  UnitSequence out;
  out.utterance_id = seq.utterance_id;
  out.units = ag::argmax_rows(logits.logits);
  return out;
}

OneHotSequence gumbel_sample(const LogitSequence& logits, double tau, Rng& rng, bool hard) {
  Mat noise(logits.logits.rows(), logits.logits.cols());
  for (int64_t i = 0; i < noise.size(); ++i) noise.data()[i] = rng.gumbel();
  return gumbel_sample_with_noise(logits, tau, noise, hard);
}

OneHotSequence gumbel_sample_with_noise(const LogitSequence& logits, double tau, const Mat& noise,
                                        bool hard) {
  Mat soft = ag::gumbel_soft_value(logits.logits, noise, tau);
  OneHotSequence out;
  out.hard = hard;
  out.vectors = hard ? ag::onehot_rows(ag::argmax_rows(soft), soft.cols()) : std::move(soft);
  return out;
}

}  // namespace nast
