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

#include <doctest.h>

#include <fstream>

#include "nast/tokenize.hpp"
#include "testutil.hpp"

using namespace nast;
using testutil::TempDir;

namespace {

UnitSequence units_of(std::vector<int> v) {
  UnitSequence z;
  z.utterance_id = "z";
  z.units = std::move(v);
  return z;
}

}  // namespace

TEST_SUITE("tokenize") {

TEST_CASE("dedup collapses runs") {
  CHECK(dedup(units_of({5, 5, 2, 2, 2, 5})).units == std::vector<int>{5, 2, 5});
  CHECK(dedup(units_of({})).units.empty());
  CHECK(dedup(units_of({1, 2, 1, 2})).units == std::vector<int>{1, 2, 1, 2});
}

TEST_CASE("dedup idempotence and length on random sequences") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t len = rng.uniform_index(30);
    std::vector<int> v(len);
    for (auto& x : v) x = static_cast<int>(rng.uniform_index(4));
    const UnitSequence z = units_of(v);
    const UnitSequence d1 = dedup(z);
    const UnitSequence d2 = dedup(d1);
    CHECK(d1.units == d2.units);
    CHECK(d1.units.size() <= z.units.size());
    bool has_repeat = false;
    for (size_t i = 1; i < v.size(); ++i)
      if (v[i] == v[i - 1]) has_repeat = true;
    CHECK((d1.units.size() == z.units.size()) == !has_repeat);
  }
}

TEST_CASE("unit file format and round-trip") {
  TempDir tmp("units");
  std::vector<UnitSequence> seqs;
  seqs.push_back(units_of({1, 2, 3}));
  seqs[0].utterance_id = "utt_a";
  seqs.push_back(units_of({}));
  seqs[1].utterance_id = "utt_b";
  const auto path = tmp.path() / "u.txt";
  write_unit_file(seqs, path);
  CHECK(testutil::read_text_file(path) == "utt_a\t1 2 3\nutt_b\t\n");

  const auto back = read_unit_file(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].utterance_id == "utt_a");
  CHECK(back[0].units == std::vector<int>{1, 2, 3});
  CHECK(back[1].units.empty());
}

TEST_CASE("kmeans fixed point on k distinct points") {
  Mat data(3, 2);
  data(0, 0) = 0.0;
  data(0, 1) = 0.0;
  data(1, 0) = 10.0;
  data(1, 1) = 0.0;
  data(2, 0) = 0.0;
  data(2, 1) = 10.0;
  const KMeansModel m = kmeans_fit(data, 3, 1);
  CHECK(m.inertia_history.back() == doctest::Approx(0.0));
  // every data point is some centroid
  for (int64_t i = 0; i < 3; ++i) {
    bool found = false;
    for (int64_t c = 0; c < 3; ++c)
      if (m.centroids(c, 0) == data(i, 0) && m.centroids(c, 1) == data(i, 1)) found = true;
    CHECK(found);
  }
}

TEST_CASE("kmeans with k=1 returns the global mean") {
  Rng rng(3);
  Mat data(50, 4);
  for (int64_t i = 0; i < data.size(); ++i) data.data()[i] = rng.gaussian();
  const KMeansModel m = kmeans_fit(data, 1, 9);
  for (int64_t c = 0; c < 4; ++c) {
    double mean = 0.0;
    for (int64_t i = 0; i < 50; ++i) mean += data(i, c);
    mean /= 50.0;
    CHECK(m.centroids(0, c) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("kmeans separates two well-spread blobs") {
  Rng rng(12);
  const int64_t per_blob = 200;
  const double spread = 0.3;
  Mat data(2 * per_blob, 3);
  Mat blob_means(2, 3);
  for (int64_t b = 0; b < 2; ++b)
    for (int64_t c = 0; c < 3; ++c) blob_means(b, c) = b == 0 ? -5.0 : 5.0;
  Mat empirical(2, 3);
  for (int64_t i = 0; i < 2 * per_blob; ++i) {
    const int64_t b = i / per_blob;
    for (int64_t c = 0; c < 3; ++c) {
      data(i, c) = blob_means(b, c) + spread * rng.gaussian();
      empirical(b, c) += data(i, c) / static_cast<double>(per_blob);
    }
  }
  const KMeansModel m = kmeans_fit(data, 2, 4);
  const double tol = 3.0 * spread / std::sqrt(static_cast<double>(per_blob));
  for (int64_t b = 0; b < 2; ++b) {
    // match each empirical mean to its nearest centroid
    int64_t best = 0;
    double best_d = 1e300;
    for (int64_t c = 0; c < 2; ++c) {
      double d = 0.0;
      for (int64_t j = 0; j < 3; ++j) {
        const double diff = m.centroids(c, j) - empirical(b, j);
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    for (int64_t j = 0; j < 3; ++j)
      CHECK(std::abs(m.centroids(best, j) - empirical(b, j)) < tol);
  }
}

TEST_CASE("kmeans inertia history is non-increasing") {
  Rng rng(21);
  Mat data(300, 5);
  for (int64_t i = 0; i < data.size(); ++i) data.data()[i] = rng.gaussian() * 2.0;
  const KMeansModel m = kmeans_fit(data, 7, 13);
  REQUIRE(m.inertia_history.size() >= 2);
  for (size_t i = 1; i < m.inertia_history.size(); ++i)
    CHECK(m.inertia_history[i] <= m.inertia_history[i - 1] + 1e-9);
}

TEST_CASE("kmeans rejects degenerate inputs") {
  SUBCASE("fewer points than clusters") {
    Mat data(3, 2);
    CHECK_THROWS_AS(kmeans_fit(data, 5, 0), ValidationError);
  }
  SUBCASE("all-identical data with k > 1") {
    Mat data(20, 2);
    for (int64_t i = 0; i < data.size(); ++i) data.data()[i] = 1.5;
    CHECK_THROWS_WITH_AS(kmeans_fit(data, 2, 0), doctest::Contains("distinct"), ValidationError);
  }
}

TEST_CASE("kmeans_assign matches the brute-force oracle and tie rule") {
  Rng rng(30);
  KMeansModel model;
  model.centroids = Mat(6, 4);
  for (int64_t i = 0; i < model.centroids.size(); ++i) model.centroids.data()[i] = rng.gaussian();

  SUBCASE("random frames match brute force") {
    FeatureSequence seq;
    seq.utterance_id = "bf";
    seq.frames = FloatMat(100, 4);
    for (auto& v : seq.frames.data) v = static_cast<float>(rng.gaussian() * 2.0);
    const UnitSequence z = kmeans_assign(model, seq);
    for (int64_t t = 0; t < 100; ++t) {
      int best = 0;
      double best_d = 1e300;
      for (int64_t c = 0; c < 6; ++c) {
        double d = 0.0;
        for (int64_t j = 0; j < 4; ++j) {
          const double diff = static_cast<double>(seq.frames.at(t, j)) - model.centroids(c, j);
          d += diff * diff;
        }
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      CHECK(z.units[static_cast<size_t>(t)] == best);
    }
  }

  SUBCASE("frame equal to a centroid maps to it") {
    FeatureSequence seq;
    seq.utterance_id = "eq";
    seq.frames = FloatMat(1, 4);
    // quantize centroid 3 to float so distances are exactly zero
    for (int64_t j = 0; j < 4; ++j) {
      seq.frames.at(0, j) = static_cast<float>(model.centroids(3, j));
      model.centroids(3, j) = static_cast<double>(seq.frames.at(0, j));
    }
    CHECK(kmeans_assign(model, seq).units[0] == 3);
  }

  SUBCASE("equidistant frame takes the lowest index") {
    KMeansModel m2;
    m2.centroids = Mat(2, 1);
    m2.centroids(0, 0) = -1.0;
    m2.centroids(1, 0) = 1.0;
    FeatureSequence seq;
    seq.utterance_id = "tie";
    seq.frames = FloatMat(1, 1);
    seq.frames.at(0, 0) = 0.0f;
    CHECK(kmeans_assign(m2, seq).units[0] == 0);
  }

  SUBCASE("dimension mismatch names the utterance") {
    FeatureSequence seq;
    seq.utterance_id = "bad_dim";
    seq.frames = FloatMat(2, 3);
    CHECK_THROWS_WITH_AS(kmeans_assign(model, seq), doctest::Contains("bad_dim"), ConfigError);
  }
}

TEST_CASE("kmeans model round-trips through its container") {
  TempDir tmp("kmeans_io");
  Rng rng(8);
  Mat data(60, 3);
  for (int64_t i = 0; i < data.size(); ++i) data.data()[i] = rng.gaussian();
  const KMeansModel m = kmeans_fit(data, 4, 2);
  const auto path = tmp.path() / "km.nastkm";
  save_kmeans(m, path);
  const KMeansModel back = load_kmeans(path);
  CHECK(back.k() == 4);
  CHECK(back.inertia_history == m.inertia_history);
  // float32 storage round-trip
  for (int64_t i = 0; i < m.centroids.size(); ++i)
    CHECK(back.centroids.data()[i] ==
          static_cast<double>(static_cast<float>(m.centroids.data()[i])));
}

TEST_CASE("tokenize_corpus writes one line per record deterministically") {
  TempDir tmp("tok");
  SyntheticSpec spec;
  spec.num_utterances = 5;
  spec.num_phonemes = 3;
  spec.num_speakers = 1;
  spec.feature_dim = 6;
  spec.seed = 44;
  const auto manifest = synthesize_corpus(spec, tmp.path() / "corpus");

  const auto records = load_manifest(manifest);
  const Mat frames = stack_corpus_frames(records, manifest.parent_path());
  const KMeansModel km = kmeans_fit(frames, 3, 5);
  const KMeansQuantizer q(km);

  SUBCASE("empty manifest gives an empty file") {
    std::ofstream(tmp.path() / "empty.jsonl");
    tokenize_corpus(q, tmp.path() / "empty.jsonl", tmp.path() / "empty_units.txt");
    CHECK(testutil::read_text_file(tmp.path() / "empty_units.txt").empty());
  }

  SUBCASE("line count and unit lengths match the manifest") {
    tokenize_corpus(q, manifest, tmp.path() / "units.txt");
    const auto units = read_unit_file(tmp.path() / "units.txt");
    REQUIRE(units.size() == records.size());
    for (size_t i = 0; i < units.size(); ++i) {
      CHECK(units[i].utterance_id == records[i].utterance_id);
      CHECK(static_cast<int64_t>(units[i].units.size()) == records[i].num_frames);
    }
  }

  SUBCASE("two runs produce byte-identical files") {
    tokenize_corpus(q, manifest, tmp.path() / "a.txt");
    tokenize_corpus(q, manifest, tmp.path() / "b.txt");
    CHECK(testutil::read_text_file(tmp.path() / "a.txt") ==
          testutil::read_text_file(tmp.path() / "b.txt"));
  }
}

}  // TEST_SUITE
