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

#ifndef NAST_TOKENIZE_H_
#define NAST_TOKENIZE_H_

#include <filesystem>
#include <vector>

#include "nast/featureio.hpp"
#include "nast/model.hpp"
#include "nast/units.hpp"

namespace nast {

struct KMeansModel {
  Mat centroids;  // k x d
  std::vector<double> inertia_history;

  int64_t k() const { return centroids.rows(); }
  int64_t dim() const { return centroids.cols(); }
};

// Lloyd's algorithm with k-means++ seeding. Deterministic per seed. Empty
// clusters are repaired by stealing the farthest point of the largest
// cluster. Data with fewer than k distinct points is rejected.
KMeansModel kmeans_fit(const Mat& frames, int64_t k, uint64_t seed, int64_t max_iters = 100,
                       double tol = 1e-8);

// Nearest centroid by squared Euclidean distance; ties -> lowest index.
UnitSequence kmeans_assign(const KMeansModel& model, const FeatureSequence& seq);

void save_kmeans(const KMeansModel& model, const std::filesystem::path& path);
KMeansModel load_kmeans(const std::filesystem::path& path);

// Both quantizers expose the same tokenization contract so corpus runs and
// metrics treat them interchangeably.
class Quantizer {
 public:
  virtual ~Quantizer() = default;
  virtual UnitSequence tokenize(const FeatureSequence& seq) const = 0;
  virtual int64_t unit_count() const = 0;
  virtual int64_t input_dim() const = 0;
};

class NastQuantizer : public Quantizer {
 public:
  explicit NastQuantizer(const NastModel& model) : model_(&model) {}
  UnitSequence tokenize(const FeatureSequence& seq) const override { return model_->quantize(seq); }
  int64_t unit_count() const override { return model_->config().k; }
  int64_t input_dim() const override { return model_->config().input_dim; }

 private:
  const NastModel* model_;
};

class KMeansQuantizer : public Quantizer {
 public:
  explicit KMeansQuantizer(const KMeansModel& model) : model_(&model) {}
  UnitSequence tokenize(const FeatureSequence& seq) const override {
    return kmeans_assign(*model_, seq);
  }
  int64_t unit_count() const override { return model_->k(); }
  int64_t input_dim() const override { return model_->dim(); }

 private:
  const KMeansModel* model_;
};

// One unit line per manifest record, in manifest order.
void tokenize_corpus(const Quantizer& quantizer, const std::filesystem::path& manifest,
                     const std::filesystem::path& out_path);

std::vector<UnitSequence> tokenize_records(const Quantizer& quantizer,
                                           const std::vector<UtteranceRecord>& records,
                                           const std::filesystem::path& manifest_dir);

// Stacks every frame of the corpus into one N x d matrix (k-means training
// input).
Mat stack_corpus_frames(const std::vector<UtteranceRecord>& records,
                        const std::filesystem::path& manifest_dir);

}  // namespace nast

#endif  // NAST_TOKENIZE_H_
