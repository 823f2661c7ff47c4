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

#include "nast/autograd.hpp"

#include <algorithm>
#include <cmath>

#include "nast/common.hpp"

namespace nast::ag {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(op) + ": shape mismatch");
}

// Interpolation stencil for mapping t_in rows onto t_out rows.
struct InterpWeight {
  int64_t i0;
  int64_t i1;
  double frac;
};

std::vector<InterpWeight> interp_weights(int64_t t_in, int64_t t_out) {
  std::vector<InterpWeight> w(static_cast<size_t>(t_out));
  for (int64_t t = 0; t < t_out; ++t) {
    double s;
    if (t_out > 1) {
      s = static_cast<double>(t) * static_cast<double>(t_in - 1) / static_cast<double>(t_out - 1);
    } else {
      s = static_cast<double>(t_in - 1) / 2.0;  // single output row: middle
    }
    int64_t i0 = std::min<int64_t>(static_cast<int64_t>(s), t_in - 1);
    int64_t i1 = std::min<int64_t>(i0 + 1, t_in - 1);
    w[static_cast<size_t>(t)] = {i0, i1, s - static_cast<double>(i0)};
  }
  return w;
}

}  // namespace

Mat softmax_rows_value(const Mat& x) {
  Mat y(x.rows(), x.cols());
  for (int64_t r = 0; r < x.rows(); ++r) {
    const double* in = x.row(r);
    double* out = y.row(r);
    double mx = in[0];
    for (int64_t c = 1; c < x.cols(); ++c) mx = std::max(mx, in[c]);
    double sum = 0.0;
    for (int64_t c = 0; c < x.cols(); ++c) {
      out[c] = std::exp(in[c] - mx);
      sum += out[c];
    }
    for (int64_t c = 0; c < x.cols(); ++c) out[c] /= sum;
  }
  return y;
}

Mat gumbel_soft_value(const Mat& logits, const Mat& noise, double tau) {
  if (tau <= 0.0) throw ConfigError("gumbel: tau must be > 0");
  check_same_shape(logits, noise, "gumbel");
  Mat z(logits.rows(), logits.cols());
  for (int64_t i = 0; i < z.size(); ++i)
    z.data()[i] = (logits.data()[i] + noise.data()[i]) / tau;
  return softmax_rows_value(z);
}

std::vector<int> argmax_rows(const Mat& x) {
  std::vector<int> idx(static_cast<size_t>(x.rows()));
  for (int64_t r = 0; r < x.rows(); ++r) {
    const double* row = x.row(r);
    int best = 0;
    for (int64_t c = 1; c < x.cols(); ++c)
      if (row[c] > row[best]) best = static_cast<int>(c);
    idx[static_cast<size_t>(r)] = best;
  }
  return idx;
}

Mat onehot_rows(const std::vector<int>& idx, int64_t k) {
  Mat y(static_cast<int64_t>(idx.size()), k);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= k) throw ConfigError("onehot: index out of range");
    y(static_cast<int64_t>(r), idx[r]) = 1.0;
  }
  return y;
}

Mat interpolate_rows_value(const Mat& x, int64_t t_out) {
  if (x.rows() < 1) throw ValidationError("interpolate: empty input");
  if (t_out < 1) throw ValidationError("interpolate: target length must be >= 1");
  if (t_out == x.rows()) return x;
  const auto w = interp_weights(x.rows(), t_out);
  Mat y(t_out, x.cols());
  for (int64_t t = 0; t < t_out; ++t) {
    const auto& iw = w[static_cast<size_t>(t)];
    for (int64_t c = 0; c < x.cols(); ++c)
      y(t, c) = (1.0 - iw.frac) * x(iw.i0, c) + iw.frac * x(iw.i1, c);
  }
  return y;
}

Node* Graph::make(Mat value, bool requires_grad) {
  auto node = std::make_unique<Node>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad = Mat(node->value.rows(), node->value.cols());
  nodes_.push_back(std::move(node));
  return nodes_.back().get();
}

Node* Graph::leaf(Mat value, bool requires_grad) { return make(std::move(value), requires_grad); }

Node* Graph::add(Node* a, Node* b) {
  check_same_shape(a->value, b->value, "add");
  Mat v = a->value;
  for (int64_t i = 0; i < v.size(); ++i) v.data()[i] += b->value.data()[i];
  Node* out = make(std::move(v), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, b, out] {
      if (a->requires_grad)
        for (int64_t i = 0; i < out->grad.size(); ++i) a->grad.data()[i] += out->grad.data()[i];
      if (b->requires_grad)
        for (int64_t i = 0; i < out->grad.size(); ++i) b->grad.data()[i] += out->grad.data()[i];
    };
  }
  return out;
}

Node* Graph::scale(Node* a, double s) {
  Mat v = a->value;
  for (int64_t i = 0; i < v.size(); ++i) v.data()[i] *= s;
  Node* out = make(std::move(v), a->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, s, out] {
      for (int64_t i = 0; i < out->grad.size(); ++i) a->grad.data()[i] += s * out->grad.data()[i];
    };
  }
  return out;
}

Node* Graph::hadamard(Node* a, Node* b) {
  check_same_shape(a->value, b->value, "hadamard");
  Mat v = a->value;
  for (int64_t i = 0; i < v.size(); ++i) v.data()[i] *= b->value.data()[i];
  Node* out = make(std::move(v), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, b, out] {
      if (a->requires_grad)
        for (int64_t i = 0; i < out->grad.size(); ++i)
          a->grad.data()[i] += out->grad.data()[i] * b->value.data()[i];
      if (b->requires_grad)
        for (int64_t i = 0; i < out->grad.size(); ++i)
          b->grad.data()[i] += out->grad.data()[i] * a->value.data()[i];
    };
  }
  return out;
}

Node* Graph::matmul(Node* a, Node* b) {
  Node* out = make(nast::matmul(a->value, b->value), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, b, out] {
      if (a->requires_grad) {
        Mat da = nast::matmul_nt(out->grad, b->value);
        for (int64_t i = 0; i < da.size(); ++i) a->grad.data()[i] += da.data()[i];
      }
      if (b->requires_grad) {
        Mat db = nast::matmul_tn(a->value, out->grad);
        for (int64_t i = 0; i < db.size(); ++i) b->grad.data()[i] += db.data()[i];
      }
    };
  }
  return out;
}

Node* Graph::matmul_nt(Node* a, Node* b) {
  Node* out = make(nast::matmul_nt(a->value, b->value), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, b, out] {
      if (a->requires_grad) {
        Mat da = nast::matmul(out->grad, b->value);
        for (int64_t i = 0; i < da.size(); ++i) a->grad.data()[i] += da.data()[i];
      }
      if (b->requires_grad) {
        Mat db = nast::matmul_tn(out->grad, a->value);
        for (int64_t i = 0; i < db.size(); ++i) b->grad.data()[i] += db.data()[i];
      }
    };
  }
  return out;
}

Node* Graph::linear(Node* x, Node* w, Node* b) {
  if (x->value.cols() != w->value.cols())
    throw ConfigError("linear: input dim  " + std::to_string(x->value.cols()) +
                      " != weight fan-in " + std::to_string(w->value.cols()));
  if (b->value.rows() != 1 || b->value.cols() != w->value.rows())
    throw ConfigError("linear: bias shape mismatch");
  Mat v = nast::matmul_nt(x->value, w->value);
  for (int64_t r = 0; r < v.rows(); ++r)
    for (int64_t c = 0; c < v.cols(); ++c) v(r, c) += b->value(0, c);
  Node* out = make(std::move(v), x->requires_grad || w->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, w, b, out] {
      if (x->requires_grad) {
        Mat dx = nast::matmul(out->grad, w->value);
        for (int64_t i = 0; i < dx.size(); ++i) x->grad.data()[i] += dx.data()[i];
      }
      if (w->requires_grad) {
        Mat dw = nast::matmul_tn(out->grad, x->value);
        for (int64_t i = 0; i < dw.size(); ++i) w->grad.data()[i] += dw.data()[i];
      }
      if (b->requires_grad) {
        for (int64_t r = 0; r < out->grad.rows(); ++r)
          for (int64_t c = 0; c < out->grad.cols(); ++c) b->grad(0, c) += out->grad(r, c);
      }
    };
  }
  return out;
}

Node* Graph::silu(Node* x) {
  Mat v = x->value;
  for (int64_t i = 0; i < v.size(); ++i) {
    const double s = sigmoid(v.data()[i]);
    v.data()[i] = v.data()[i] * s;
  }
  Node* out = make(std::move(v), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, out] {
      for (int64_t i = 0; i < out->grad.size(); ++i) {
        const double xv = x->value.data()[i];
        const double s = sigmoid(xv);
        x->grad.data()[i] += out->grad.data()[i] * s * (1.0 + xv * (1.0 - s));
      }
    };
  }
  return out;
}

Node* Graph::glu_cols(Node* x) {
  if (x->value.cols() % 2 != 0) throw ConfigError("glu: column count must be even");
  const int64_t h = x->value.cols() / 2;
  Mat v(x->value.rows(), h);
  for (int64_t r = 0; r < v.rows(); ++r)
    for (int64_t c = 0; c < h; ++c)
      v(r, c) = x->value(r, c) * sigmoid(x->value(r, c + h));
  Node* out = make(std::move(v), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, h, out] {
      for (int64_t r = 0; r < out->grad.rows(); ++r)
        for (int64_t c = 0; c < h; ++c) {
          const double g = out->grad(r, c);
          const double a = x->value(r, c);
          const double s = sigmoid(x->value(r, c + h));
          x->grad(r, c) += g * s;
          x->grad(r, c + h) += g * a * s * (1.0 - s);
        }
    };
  }
  return out;
}

Node* Graph::layer_norm(Node* x, Node* gamma, Node* beta, double eps) {
  const int64_t d = x->value.cols();
  if (gamma->value.cols() != d || beta->value.cols() != d)
    throw ConfigError("layer_norm: parameter width mismatch");

  Mat xhat(x->value.rows(), d);
  std::vector<double> inv_std(static_cast<size_t>(x->value.rows()));
  for (int64_t r = 0; r < x->value.rows(); ++r) {
    const double* in = x->value.row(r);
    double mu = 0.0;
    for (int64_t c = 0; c < d; ++c) mu += in[c];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (int64_t c = 0; c < d; ++c) var += (in[c] - mu) * (in[c] - mu);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<size_t>(r)] = inv;
    for (int64_t c = 0; c < d; ++c) xhat(r, c) = (in[c] - mu) * inv;
  }
  Mat v(x->value.rows(), d);
  for (int64_t r = 0; r < v.rows(); ++r)
    for (int64_t c = 0; c < d; ++c) v(r, c) = xhat(r, c) * gamma->value(0, c) + beta->value(0, c);

  Node* out = make(std::move(v), x->requires_grad || gamma->requires_grad || beta->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, gamma, beta, out, xhat = std::move(xhat), inv_std = std::move(inv_std),
                        d] {
      for (int64_t r = 0; r < out->grad.rows(); ++r) {
        const double inv = inv_std[static_cast<size_t>(r)];
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (int64_t c = 0; c < d; ++c) {
          const double dxh = out->grad(r, c) * gamma->value(0, c);
          sum_dxhat += dxh;
          sum_dxhat_xhat += dxh * xhat(r, c);
        }
        if (x->requires_grad) {
          for (int64_t c = 0; c < d; ++c) {
            const double dxh = out->grad(r, c) * gamma->value(0, c);
            x->grad(r, c) += inv * (dxh - sum_dxhat / static_cast<double>(d) -
                                    xhat(r, c) * sum_dxhat_xhat / static_cast<double>(d));
          }
        }
        if (gamma->requires_grad)
          for (int64_t c = 0; c < d; ++c) gamma->grad(0, c) += out->grad(r, c) * xhat(r, c);
        if (beta->requires_grad)
          for (int64_t c = 0; c < d; ++c) beta->grad(0, c) += out->grad(r, c);
      }
    };
  }
  return out;
}

Node* Graph::softmax_rows(Node* x) {
  Node* out = make(softmax_rows_value(x->value), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, out] {
      for (int64_t r = 0; r < out->grad.rows(); ++r) {
        double dot = 0.0;
        for (int64_t c = 0; c < out->grad.cols(); ++c) dot += out->grad(r, c) * out->value(r, c);
        for (int64_t c = 0; c < out->grad.cols(); ++c)
          x->grad(r, c) += out->value(r, c) * (out->grad(r, c) - dot);
      }
    };
  }
  return out;
}

Node* Graph::gumbel_softmax(Node* logits, const Mat& noise, double tau, bool hard) {
  Mat soft = gumbel_soft_value(logits->value, noise, tau);
  Mat forward = hard ? onehot_rows(argmax_rows(soft), soft.cols()) : soft;
  Node* out = make(std::move(forward), logits->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [logits, out, tau, soft = std::move(soft)] {
      for (int64_t r = 0; r < out->grad.rows(); ++r) {
        double dot = 0.0;
        for (int64_t c = 0; c < out->grad.cols(); ++c) dot += out->grad(r, c) * soft(r, c);
        for (int64_t c = 0; c < out->grad.cols(); ++c)
          logits->grad(r, c) += soft(r, c) * (out->grad(r, c) - dot) / tau;
      }
    };
  }
  return out;
}

Node* Graph::mean_rows(Node* x) {
  const int64_t t = x->value.rows();
  Mat v(1, x->value.cols());
  for (int64_t r = 0; r < t; ++r)
    for (int64_t c = 0; c < x->value.cols(); ++c) v(0, c) += x->value(r, c);
  for (int64_t c = 0; c < v.cols(); ++c) v(0, c) /= static_cast<double>(t);
  Node* out = make(std::move(v), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, t, out] {
      for (int64_t r = 0; r < t; ++r)
        for (int64_t c = 0; c < out->grad.cols(); ++c)
          x->grad(r, c) += out->grad(0, c) / static_cast<double>(t);
    };
  }
  return out;
}

Node* Graph::repeat_row(Node* row, int64_t t) {
  if (row->value.rows() != 1) throw ConfigError("repeat_row: input must have one row");
  Mat v(t, row->value.cols());
  for (int64_t r = 0; r < t; ++r)
    for (int64_t c = 0; c < v.cols(); ++c) v(r, c) = row->value(0, c);
  Node* out = make(std::move(v), row->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [row, t, out] {
      for (int64_t r = 0; r < t; ++r)
        for (int64_t c = 0; c < out->grad.cols(); ++c) row->grad(0, c) += out->grad(r, c);
    };
  }
  return out;
}

Node* Graph::concat_cols(Node* a, Node* b) {
  if (a->value.rows() != b->value.rows()) throw ConfigError("concat_cols: row count mismatch");
  const int64_t ca = a->value.cols(), cb = b->value.cols();
  Mat v(a->value.rows(), ca + cb);
  for (int64_t r = 0; r < v.rows(); ++r) {
    for (int64_t c = 0; c < ca; ++c) v(r, c) = a->value(r, c);
    for (int64_t c = 0; c < cb; ++c) v(r, ca + c) = b->value(r, c);
  }
  Node* out = make(std::move(v), a->requires_grad || b->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [a, b, ca, cb, out] {
      for (int64_t r = 0; r < out->grad.rows(); ++r) {
        if (a->requires_grad)
          for (int64_t c = 0; c < ca; ++c) a->grad(r, c) += out->grad(r, c);
        if (b->requires_grad)
          for (int64_t c = 0; c < cb; ++c) b->grad(r, c) += out->grad(r, ca + c);
      }
    };
  }
  return out;
}

Node* Graph::slice_cols(Node* x, int64_t start, int64_t len) {
  if (start < 0 || start + len > x->value.cols()) throw ConfigError("slice_cols: out of range");
  Mat v(x->value.rows(), len);
  for (int64_t r = 0; r < v.rows(); ++r)
    for (int64_t c = 0; c < len; ++c) v(r, c) = x->value(r, start + c);
  Node* out = make(std::move(v), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, start, len, out] {
      for (int64_t r = 0; r < out->grad.rows(); ++r)
        for (int64_t c = 0; c < len; ++c) x->grad(r, start + c) += out->grad(r, c);
    };
  }
  return out;
}

Node* Graph::depthwise_conv1d(Node* x, Node* kernel) {
  const int64_t t = x->value.rows();
  const int64_t d = x->value.cols();
  const int64_t k = kernel->value.cols();
  if (kernel->value.rows() != d) throw ConfigError("depthwise_conv1d: kernel channel mismatch");
  if (k % 2 == 0) throw ConfigError("depthwise_conv1d: kernel size must be odd");
  const int64_t c0 = k / 2;

  Mat v(t, d);
  for (int64_t r = 0; r < t; ++r)
    for (int64_t c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int64_t j = 0; j < k; ++j) {
        const int64_t src = r + j - c0;
        if (src >= 0 && src < t) acc += x->value(src, c) * kernel->value(c, j);
      }
      v(r, c) = acc;
    }
  Node* out = make(std::move(v), x->requires_grad || kernel->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, kernel, t, d, k, c0, out] {
      for (int64_t r = 0; r < t; ++r)
        for (int64_t c = 0; c < d; ++c) {
          const double g = out->grad(r, c);
          if (g == 0.0) continue;
          for (int64_t j = 0; j < k; ++j) {
            const int64_t src = r + j - c0;
            if (src < 0 || src >= t) continue;
            if (x->requires_grad) x->grad(src, c) += g * kernel->value(c, j);
            if (kernel->requires_grad) kernel->grad(c, j) += g * x->value(src, c);
          }
        }
    };
  }
  return out;
}

Node* Graph::interpolate_rows(Node* x, int64_t t_out) {
  if (x->value.rows() < 1) throw ValidationError("interpolate: empty input");
  if (t_out < 1) throw ValidationError("interpolate: target length must be >= 1");
  const int64_t t_in = x->value.rows();
  Node* out = make(interpolate_rows_value(x->value, t_out), x->requires_grad);
  if (out->requires_grad) {
    if (t_in == t_out) {
      out->backward_fn = [x, out] {
        for (int64_t i = 0; i < out->grad.size(); ++i) x->grad.data()[i] += out->grad.data()[i];
      };
    } else {
      out->backward_fn = [x, t_in, t_out, out] {
        const auto w = interp_weights(t_in, t_out);
        for (int64_t t = 0; t < t_out; ++t) {
          const auto& iw = w[static_cast<size_t>(t)];
          for (int64_t c = 0; c < out->grad.cols(); ++c) {
            x->grad(iw.i0, c) += (1.0 - iw.frac) * out->grad(t, c);
            x->grad(iw.i1, c) += iw.frac * out->grad(t, c);
          }
        }
      };
    }
  }
  return out;
}

Node* Graph::l1_mean(Node* pred, const Mat& target) {
  check_same_shape(pred->value, target, "l1_mean");
  const double n = static_cast<double>(pred->value.size());
  double acc = 0.0;
  for (int64_t i = 0; i < pred->value.size(); ++i)
    acc += std::abs(pred->value.data()[i] - target.data()[i]);
  Mat v(1, 1);
  v(0, 0) = acc / n;
  Node* out = make(std::move(v), pred->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [pred, target, n, out] {
      const double g = out->grad(0, 0) / n;
      for (int64_t i = 0; i < pred->value.size(); ++i) {
        const double diff = pred->value.data()[i] - target.data()[i];
        pred->grad.data()[i] += g * (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0));
      }
    };
  }
  return out;
}

Node* Graph::ce_sum_rows(Node* logits, const Mat& target_rows) {
  check_same_shape(logits->value, target_rows, "ce_sum_rows");
  double total = 0.0;
  for (int64_t r = 0; r < logits->value.rows(); ++r) {
    const double* row = logits->value.row(r);
    double mx = row[0];
    for (int64_t c = 1; c < logits->value.cols(); ++c) mx = std::max(mx, row[c]);
    double lse = 0.0;
    for (int64_t c = 0; c < logits->value.cols(); ++c) lse += std::exp(row[c] - mx);
    lse = mx + std::log(lse);
    double dot = 0.0;
    for (int64_t c = 0; c < logits->value.cols(); ++c) dot += target_rows(r, c) * row[c];
    total += lse - dot;
  }
  Mat v(1, 1);
  v(0, 0) = total;
  Node* out = make(std::move(v), logits->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [logits, target_rows, out] {
      const double g = out->grad(0, 0);
      Mat probs = softmax_rows_value(logits->value);
      for (int64_t r = 0; r < probs.rows(); ++r)
        for (int64_t c = 0; c < probs.cols(); ++c)
          logits->grad(r, c) += g * (probs(r, c) - target_rows(r, c));
    };
  }
  return out;
}

Node* Graph::plogp_sum(Node* x, double eps) {
  double acc = 0.0;
  for (int64_t i = 0; i < x->value.size(); ++i) {
    const double p = x->value.data()[i];
    acc += p * std::log(std::max(p, eps));
  }
  Mat v(1, 1);
  v(0, 0) = acc;
  Node* out = make(std::move(v), x->requires_grad);
  if (out->requires_grad) {
    out->backward_fn = [x, eps, out] {
      const double g = out->grad(0, 0);
      for (int64_t i = 0; i < x->value.size(); ++i) {
        const double p = x->value.data()[i];
        x->grad.data()[i] += g * (p > eps ? std::log(p) + 1.0 : std::log(eps));
      }
    };
  }
  return out;
}

void Graph::backward(Node* loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1)
    throw ConfigError("backward: loss must be a scalar");
  if (!loss->requires_grad) return;
  loss->grad(0, 0) = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    Node* n = it->get();
    if (n->requires_grad && n->backward_fn) n->backward_fn();
  }
}

}  // namespace nast::ag
