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

#include "nast/tokenize.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "nast/checkpoint.hpp"

namespace nast {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

double sq_dist(const double* a, const double* b, int64_t d) {
  double acc = 0.0;
  for (int64_t i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

int nearest_centroid(const Mat& centroids, const double* point) {
  int best = 0;
  double best_dist = sq_dist(centroids.row(0), point, centroids.cols());
  for (int64_t c = 1; c < centroids.rows(); ++c) {
    const double dist = sq_dist(centroids.row(c), point, centroids.cols());
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

KMeansModel kmeans_fit(const Mat& frames, int64_t k, uint64_t seed, int64_t max_iters, double tol) {
  const int64_t n = frames.rows();
  const int64_t d = frames.cols();
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (n < k)
    throw ValidationError("kmeans: need at least k=" + std::to_string(k) + " points, got " +
                          std::to_string(n));

  Rng rng(seed);
  Mat centroids(k, d);

  // k-means++ seeding.
  {
    const int64_t first = static_cast<int64_t>(rng.uniform_index(static_cast<uint64_t>(n)));
    for (int64_t c = 0; c < d; ++c) centroids(0, c) = frames(first, c);
    std::vector<double> dist(static_cast<size_t>(n));
    for (int64_t chosen = 1; chosen < k; ++chosen) {
      double total = 0.0;
      for (int64_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::max();
        for (int64_t c = 0; c < chosen; ++c)
          best = std::min(best, sq_dist(centroids.row(c), frames.row(i), d));
        dist[static_cast<size_t>(i)] = best;
        total += best;
      }
      if (total <= 0.0)
        throw ValidationError("kmeans: fewer than k distinct points (degenerate data)");
      const double r = rng.uniform() * total;
      double acc = 0.0;
      int64_t pick = -1;
      for (int64_t i = 0; i < n; ++i) {
        acc += dist[static_cast<size_t>(i)];
        if (acc >= r && dist[static_cast<size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding pushed r past the last mass
        for (int64_t i = n - 1; i >= 0; --i)
          if (dist[static_cast<size_t>(i)] > 0.0) {
            pick = i;
            break;
          }
      }
      for (int64_t c = 0; c < d; ++c) centroids(chosen, c) = frames(pick, c);
    }
  }

  KMeansModel model;
  std::vector<int> assignment(static_cast<size_t>(n), 0);

  for (int64_t iter = 0; iter < max_iters; ++iter) {
    // Assignment + inertia under the current centroids.
    double inertia = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const int a = nearest_centroid(centroids, frames.row(i));
      assignment[static_cast<size_t>(i)] = a;
      inertia += sq_dist(centroids.row(a), frames.row(i), d);
    }
    model.inertia_history.push_back(inertia);

    // Update.
    Mat sums(k, d);
    std::vector<int64_t> counts(static_cast<size_t>(k), 0);
    for (int64_t i = 0; i < n; ++i) {
      const int a = assignment[static_cast<size_t>(i)];
      ++counts[static_cast<size_t>(a)];
      for (int64_t c = 0; c < d; ++c) sums(a, c) += frames(i, c);
    }

    Mat updated(k, d);
    double max_shift = 0.0;
    for (int64_t c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        for (int64_t j = 0; j < d; ++j)
          updated(c, j) = sums(c, j) / static_cast<double>(counts[static_cast<size_t>(c)]);
      } else {
        for (int64_t j = 0; j < d; ++j) updated(c, j) = centroids(c, j);
      }
    }

    // Empty-cluster repair: move each empty centroid onto the farthest point
    // of the currently largest cluster. The empty centroid served no points,
    // so the move cannot raise the assignment cost.
    for (int64_t c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) continue;
      int64_t largest = 0;
      for (int64_t c2 = 1; c2 < k; ++c2)
        if (counts[static_cast<size_t>(c2)] > counts[static_cast<size_t>(largest)]) largest = c2;
      int64_t farthest = -1;
      double far_dist = -1.0;
      for (int64_t i = 0; i < n; ++i) {
        if (assignment[static_cast<size_t>(i)] != static_cast<int>(largest)) continue;
        const double dist = sq_dist(updated.row(largest), frames.row(i), d);
        if (dist > far_dist) {
          far_dist = dist;
          farthest = i;
        }
      }
      if (farthest < 0) continue;
      for (int64_t j = 0; j < d; ++j) updated(c, j) = frames(farthest, j);
      counts[static_cast<size_t>(c)] = 1;
      counts[static_cast<size_t>(largest)] -= 1;
      assignment[static_cast<size_t>(farthest)] = static_cast<int>(c);
    }

    for (int64_t c = 0; c < k; ++c)
      max_shift = std::max(max_shift, sq_dist(updated.row(c), centroids.row(c), d));
    centroids = updated;
    if (max_shift < tol) break;
  }

  // Final inertia under the converged centroids.
  double inertia = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const int a = nearest_centroid(centroids, frames.row(i));
    inertia += sq_dist(centroids.row(a), frames.row(i), d);
  }
  model.inertia_history.push_back(inertia);
  model.centroids = std::move(centroids);
  return model;
}

UnitSequence kmeans_assign(const KMeansModel& model, const FeatureSequence& seq) {
  if (seq.dim() != model.dim())
    throw ConfigError("kmeans_assign: utterance '" + seq.utterance_id + "' has dim " +
                      std::to_string(seq.dim()) + ", model expects " +
                      std::to_string(model.dim()));
  UnitSequence out;
  out.utterance_id = seq.utterance_id;
  out.units.reserve(static_cast<size_t>(seq.num_frames()));
  const Mat frames = to_mat(seq.frames);
  for (int64_t t = 0; t < frames.rows(); ++t)
    out.units.push_back(nearest_centroid(model.centroids, frames.row(t)));
  return out;
}

void save_kmeans(const KMeansModel& model, const fs::path& path) {
  Container c;
  json j;
  j["format"] = "nast-kmeans";
  j["toolkit_version"] = kVersion;
  j["k"] = model.k();
  j["dim"] = model.dim();
  j["inertia_history"] = model.inertia_history;
  c.json_text = j.dump();
  c.tensors.emplace_back("centroids", to_float(model.centroids));
  write_container(path, kKMeansMagic, c);
}

KMeansModel load_kmeans(const fs::path& path) {
  Container c = read_container(path, kKMeansMagic);
  json j;
  try {
    j = json::parse(c.json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("kmeans json: ") + e.what());
  }
  KMeansModel model;
  if (j.contains("inertia_history"))
    model.inertia_history = j["inertia_history"].get<std::vector<double>>();
  for (auto& [name, value] : c.tensors) {
    if (name == "centroids") model.centroids = to_mat(value);
  }
  if (model.centroids.empty()) throw FormatError("kmeans file has no centroids: " + path.string());
  return model;
}

std::vector<UnitSequence> tokenize_records(const Quantizer& quantizer,
                                           const std::vector<UtteranceRecord>& records,
                                           const fs::path& manifest_dir) {
  std::vector<UnitSequence> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    FeatureSequence seq = load_record_features(rec, manifest_dir);
    if (seq.dim() != quantizer.input_dim())
      throw ConfigError("tokenize: utterance '" + rec.utterance_id + "' has dim " +
                        std::to_string(seq.dim()) + ", quantizer expects " +
                        std::to_string(quantizer.input_dim()));
    out.push_back(quantizer.tokenize(seq));
  }
  return out;
}

void tokenize_corpus(const Quantizer& quantizer, const fs::path& manifest,
                     const fs::path& out_path) {
  const auto records = load_manifest(manifest, /*validate=*/false);
  const auto units = tokenize_records(quantizer, records, manifest.parent_path());
  write_unit_file(units, out_path);
}

Mat stack_corpus_frames(const std::vector<UtteranceRecord>& records, const fs::path& manifest_dir) {
  int64_t total = 0;
  int64_t d = -1;
  std::vector<FeatureSequence> seqs;
  seqs.reserve(records.size());
  for (const auto& rec : records) {
    seqs.push_back(load_record_features(rec, manifest_dir));
    if (d < 0) d = seqs.back().dim();
    if (seqs.back().dim() != d)
      throw ValidationError("corpus has mixed feature dims (utterance '" + rec.utterance_id + "')");
    total += seqs.back().num_frames();
  }
  Mat frames(total, d);
  int64_t row = 0;
  for (const auto& seq : seqs)
    for (int64_t t = 0; t < seq.num_frames(); ++t, ++row)
      for (int64_t c = 0; c < d; ++c) frames(row, c) = seq.frames.at(t, c);
  return frames;
}

}  // namespace nast
