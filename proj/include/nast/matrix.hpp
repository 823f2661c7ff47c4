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

#ifndef NAST_MATRIX_H_
#define NAST_MATRIX_H_

#include <cmath>
#include <cstdint>
#include <vector>

#include "nast/common.hpp"

namespace nast {

// Dense row-major double matrix. All model math runs in double; feature files
// and checkpoints hold float32 (see FloatMat), converted at the boundary.
class Mat {
 public:
  Mat() = default;
  Mat(int64_t rows, int64_t cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), 0.0) {}
  Mat(int64_t rows, int64_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {}

  int64_t rows() const { return rows_; }
  int64_t cols() const { return cols_; }
  int64_t size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int64_t r, int64_t c) { return data_[static_cast<size_t>(r * cols_ + c)]; }
  double operator()(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r * cols_ + c)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  double* row(int64_t r) { return data_.data() + r * cols_; }
  const double* row(int64_t r) const { return data_.data() + r * cols_; }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  int64_t rows_ = 0;
  int64_t cols_ = 0;
  std::vector<double> data_;
};

// a * b
Mat matmul(const Mat& a, const Mat& b);
// a * b^T
Mat matmul_nt(const Mat& a, const Mat& b);
// a^T * b
Mat matmul_tn(const Mat& a, const Mat& b);

// Row-major float32 matrix: the on-disk dtype for features, checkpoints and
// model parameters.
struct FloatMat {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<float> data;

  FloatMat() = default;
  FloatMat(int64_t r, int64_t c) : rows(r), cols(c), data(static_cast<size_t>(r * c), 0.0f) {}

  float& at(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols + c)]; }
  float at(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols + c)]; }

  bool all_finite() const {
    for (float v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }
};

inline Mat to_mat(const FloatMat& f) {
  Mat m(f.rows, f.cols);
  for (int64_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(f.data[static_cast<size_t>(i)]);
  return m;
}

inline FloatMat to_float(const Mat& m) {
  FloatMat f(m.rows(), m.cols());
  for (int64_t i = 0; i < m.size(); ++i) f.data[static_cast<size_t>(i)] = static_cast<float>(m.data()[i]);
  return f;
}

}  // namespace nast

#endif  // NAST_MATRIX_H_
