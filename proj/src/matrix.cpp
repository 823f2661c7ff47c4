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

#include "nast/matrix.hpp"

#include <Eigen/Core>

namespace nast {

namespace {
using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;
}  // namespace

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw ConfigError("matmul: inner dimensions disagree");
  Mat out(a.rows(), b.cols());
  MMap(out.data(), out.rows(), out.cols()) =
      CMap(a.data(), a.rows(), a.cols()) * CMap(b.data(), b.rows(), b.cols());
  return out;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw ConfigError("matmul_nt: inner dimensions disagree");
  Mat out(a.rows(), b.rows());
  MMap(out.data(), out.rows(), out.cols()) =
      CMap(a.data(), a.rows(), a.cols()) * CMap(b.data(), b.rows(), b.cols()).transpose();
  return out;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw ConfigError("matmul_tn: inner dimensions disagree");
  Mat out(a.cols(), b.cols());
  MMap(out.data(), out.rows(), out.cols()) =
      CMap(a.data(), a.rows(), a.cols()).transpose() * CMap(b.data(), b.rows(), b.cols());
  return out;
}

}  // namespace nast
