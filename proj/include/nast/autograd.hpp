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

#ifndef NAST_AUTOGRAD_H_
#define NAST_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <vector>

#include "nast/matrix.hpp"

namespace nast::ag {

// One value in the computation tape. Gradients are accumulated in creation
// order reversed; double precision throughout so finite-difference checks
// resolve to ~1e-10.
struct Node {
  Mat value;
  Mat grad;  // allocated iff requires_grad
  bool requires_grad = false;
  std::function<void()> backward_fn;
};

// A single-use computation tape. Build the forward pass, call backward()
// once, read gradients off the leaves, drop the graph.
class Graph {
 public:
  Node* leaf(Mat value, bool requires_grad = false);
  Node* constant(const Mat& value) { return leaf(value, false); }

  Node* add(Node* a, Node* b);
  Node* scale(Node* a, double s);
  Node* hadamard(Node* a, Node* b);
  Node* matmul(Node* a, Node* b);
  Node* matmul_nt(Node* a, Node* b);  // a * b^T

  // y = x * w^T + b, with x: T x in, w: out x in, b: 1 x out.
  Node* linear(Node* x, Node* w, Node* b);

  Node* silu(Node* x);
  Node* glu_cols(Node* x);  // [a | b] -> a * sigmoid(b)
  Node* layer_norm(Node* x, Node* gamma, Node* beta, double eps = 1e-5);
  Node* softmax_rows(Node* x);

  // softmax((x + noise) / tau) per row; hard replaces the forward value by
  // the argmax one-hot while gradients follow the soft sample.
  Node* gumbel_softmax(Node* logits, const Mat& noise, double tau, bool hard);

  Node* mean_rows(Node* x);                  // T x d -> 1 x d
  Node* repeat_row(Node* row, int64_t t);    // 1 x d -> t x d
  Node* concat_cols(Node* a, Node* b);
  Node* slice_cols(Node* x, int64_t start, int64_t len);

  // x: T x d, kernel: d x K (K odd), zero-padded "same" convolution along t.
  Node* depthwise_conv1d(Node* x, Node* kernel);

  // Linear interpolation of rows onto t_out rows (endpoints preserved).
  Node* interpolate_rows(Node* x, int64_t t_out);

  // Scalar outputs (1x1 nodes).
  Node* l1_mean(Node* pred, const Mat& target);
  Node* ce_sum_rows(Node* logits, const Mat& target_rows);  // sum over rows
  Node* plogp_sum(Node* x, double eps = 1e-8);              // sum x*ln(max(x,eps))

  Node* detach(Node* x) { return leaf(x->value, false); }

  void backward(Node* loss);
  size_t size() const { return nodes_.size(); }

 private:
  Node* make(Mat value, bool requires_grad);
  std::vector<std::unique_ptr<Node>> nodes_;
};

// Plain-matrix helpers shared by inference paths and tests.
Mat softmax_rows_value(const Mat& x);
Mat gumbel_soft_value(const Mat& logits, const Mat& noise, double tau);
std::vector<int> argmax_rows(const Mat& x);       // ties -> lowest index
Mat onehot_rows(const std::vector<int>& idx, int64_t k);
Mat interpolate_rows_value(const Mat& x, int64_t t_out);

}  // namespace nast::ag

#endif  // NAST_AUTOGRAD_H_
