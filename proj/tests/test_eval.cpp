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

#include "nast/eval.hpp"
#include "testutil.hpp"

using namespace nast;
using testutil::TempDir;

namespace {

UnitSequence units_of(std::vector<int> v, const std::string& id = "z") {
  UnitSequence z;
  z.utterance_id = id;
  z.units = std::move(v);
  return z;
}

// Enumerate all sequences over {0,1,2} of the given length.
void enumerate(int length, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(static_cast<size_t>(length), 0);
  while (true) {
    out.push_back(cur);
    int i = length - 1;
    while (i >= 0 && cur[static_cast<size_t>(i)] == 2) {
      cur[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<size_t>(i)];
  }
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("levenshtein basics") {
  CHECK(levenshtein(units_of({1, 2, 3}), units_of({1, 2, 3})) == 0);
  CHECK(levenshtein(units_of({}), units_of({1, 2, 3, 4})) == 4);
  CHECK(levenshtein(units_of({1, 2, 3, 4}), units_of({})) == 4);
  CHECK(levenshtein(units_of({1, 2, 3}), units_of({1, 3})) == 1);
  CHECK(levenshtein(units_of({0, 1}), units_of({1, 0})) == 2);
}

TEST_CASE("levenshtein equals exhaustive recursion on all small pairs") {
  // All pairs over {0,1,2} with combined length <= 8.
  std::vector<std::vector<std::vector<int>>> by_len(9);
  for (int l = 0; l <= 8; ++l) enumerate(l, by_len[static_cast<size_t>(l)]);
  int64_t pairs = 0;
  for (int la = 0; la <= 8; ++la) {
    for (int lb = 0; lb + la <= 8; ++lb) {
      for (const auto& a : by_len[static_cast<size_t>(la)]) {
        for (const auto& b : by_len[static_cast<size_t>(lb)]) {
          const int64_t dp = levenshtein(units_of(a), units_of(b));
          const int64_t oracle = testutil::levenshtein_recursive(a, 0, b, 0);
          REQUIRE(dp == oracle);
          ++pairs;
        }
      }
    }
  }
  CHECK(pairs == 83653);
}

TEST_CASE("levenshtein equals exhaustive recursion on random length-8 pairs") {
  Rng rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> a(8), b(8);
    for (auto& v : a) v = static_cast<int>(rng.uniform_index(3));
    for (auto& v : b) v = static_cast<int>(rng.uniform_index(3));
    CHECK(levenshtein(units_of(a), units_of(b)) == testutil::levenshtein_recursive(a, 0, b, 0));
  }
}

TEST_CASE("levenshtein metric axioms on random sequences") {
  Rng rng(72);
  auto random_units = [&] {
    std::vector<int> v(rng.uniform_index(12));
    for (auto& x : v) x = static_cast<int>(rng.uniform_index(5));
    return units_of(v);
  };
  for (int trial = 0; trial < 300; ++trial) {
    const UnitSequence a = random_units();
    const UnitSequence b = random_units();
    const UnitSequence c = random_units();
    const int64_t ab = levenshtein(a, b);
    CHECK(ab == levenshtein(b, a));
    CHECK((ab == 0) == (a.units == b.units));
    CHECK(ab <= levenshtein(a, c) + levenshtein(c, b));
  }
}

TEST_CASE("unit edit distance normalization") {
  SUBCASE("identical sequences give zero") {
    CHECK(unit_edit_distance(units_of({1, 1, 2, 3}), units_of({1, 2, 2, 3})) ==
          doctest::Approx(0.0));  // equal after dedup
    CHECK(unit_edit_distance(units_of({4, 5}), units_of({4, 5})) == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed ratio") {
    // dedup(clean)=[1,2,3], dedup(aug)=[1,3] -> 100 * 1/3
    CHECK(unit_edit_distance(units_of({1, 2, 2, 3}), units_of({1, 1, 3})) ==
          doctest::Approx(100.0 / 3.0).epsilon(1e-9));
  }
  SUBCASE("empty clean guard") {
    CHECK(unit_edit_distance(units_of({}), units_of({1, 2, 3})) == doctest::Approx(300.0));
  }
  SUBCASE("UED(z,z) == 0 for 1000 random sequences") {
    Rng rng(73);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<int> v(1 + rng.uniform_index(40));
      for (auto& x : v) x = static_cast<int>(rng.uniform_index(8));
      const UnitSequence z = units_of(v);
      CHECK(unit_edit_distance(z, z) == doctest::Approx(0.0));
    }
  }
  SUBCASE("invariant under consistent relabeling") {
    Rng rng(74);
    const std::vector<int> perm = {3, 0, 4, 1, 2};
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<int> a(1 + rng.uniform_index(20)), b(1 + rng.uniform_index(20));
      for (auto& x : a) x = static_cast<int>(rng.uniform_index(5));
      for (auto& x : b) x = static_cast<int>(rng.uniform_index(5));
      auto relabel = [&](std::vector<int> v) {
        for (auto& x : v) x = perm[static_cast<size_t>(x)];
        return v;
      };
      CHECK(unit_edit_distance(units_of(a), units_of(b)) ==
            doctest::Approx(unit_edit_distance(units_of(relabel(a)), units_of(relabel(b)))));
    }
  }
}

TEST_CASE("unit usage statistics") {
  SUBCASE("uniform counts give normalized entropy one") {
    const auto stats = unit_usage_stats({units_of({0, 1, 2, 3})}, 4);
    CHECK(stats.normalized_entropy == doctest::Approx(1.0));
  }
  SUBCASE("single unit gives zero") {
    const auto stats = unit_usage_stats({units_of({2, 2, 2})}, 4);
    CHECK(stats.normalized_entropy == doctest::Approx(0.0));
  }
  SUBCASE("hand-computed skewed counts") {
    const auto stats = unit_usage_stats({units_of({0, 0, 0, 1})}, 2);
    CHECK(stats.entropy_nats == doctest::Approx(0.5623).epsilon(1e-3));
    CHECK(stats.normalized_entropy == doctest::Approx(0.8113).epsilon(1e-3));
  }
  SUBCASE("out-of-range unit id is rejected") {
    CHECK_THROWS_AS(unit_usage_stats({units_of({0, 4})}, 4), ValidationError);
  }
}

TEST_CASE("phoneme purity") {
  auto record_with_labels = [](const std::string& id, std::vector<int> labels) {
    UtteranceRecord rec;
    rec.utterance_id = id;
    rec.speaker_id = "s";
    rec.num_frames = static_cast<int64_t>(labels.size());
    rec.phoneme_labels = std::move(labels);
    return rec;
  };

  SUBCASE("units identical to labels give NMI 1") {
    const std::vector<int> labels = {0, 1, 2, 3, 0, 1, 2, 3, 1, 2};
    const auto report = phoneme_purity({units_of(labels)}, {record_with_labels("a", labels)}, 4);
    CHECK(report.nmi == doctest::Approx(1.0));
    CHECK(report.frame_accuracy_best_map == doctest::Approx(1.0));
  }
  SUBCASE("permutation relabeling keeps NMI 1") {
    const std::vector<int> labels = {0, 1, 2, 3, 0, 1, 2, 3, 1, 2};
    std::vector<int> relabeled = labels;
    const std::vector<int> perm = {2, 3, 0, 1};
    for (auto& v : relabeled) v = perm[static_cast<size_t>(v)];
    const auto report =
        phoneme_purity({units_of(relabeled)}, {record_with_labels("a", labels)}, 4);
    CHECK(report.nmi == doctest::Approx(1.0));
    CHECK(report.frame_accuracy_best_map == doctest::Approx(1.0));
  }
  SUBCASE("independent labelings give near-zero NMI") {
    Rng rng(75);
    const int n = 20000;
    std::vector<int> labels(n), units(n);
    for (int i = 0; i < n; ++i) {
      labels[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_index(8));
      units[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_index(8));
    }
    const auto report = phoneme_purity({units_of(units)}, {record_with_labels("a", labels)}, 8);
    CHECK(report.nmi < 0.05);
    CHECK(report.nmi >= 0.0);
  }
  SUBCASE("label length mismatch is rejected") {
    CHECK_THROWS_AS(phoneme_purity({units_of({0, 1})}, {record_with_labels("a", {0, 1, 2})}, 2),
                    ValidationError);
  }
  SUBCASE("confusion counts sum to total frames") {
    const std::vector<int> labels = {0, 0, 1, 1, 2};
    const std::vector<int> units = {1, 1, 0, 0, 1};
    const auto report = phoneme_purity({units_of(units)}, {record_with_labels("a", labels)}, 2);
    int64_t total = 0;
    for (const auto& row : report.confusion)
      for (int64_t c : row) total += c;
    CHECK(total == 5);
  }
}

TEST_CASE("speaker probe") {
  SUBCASE("linearly separable speakers probe to accuracy 1") {
    std::vector<std::vector<double>> reps;
    std::vector<std::string> speakers;
    Rng rng(76);
    for (int i = 0; i < 30; ++i) {
      const bool a = i % 2 == 0;
      std::vector<double> rep = {a ? 1.0 : -1.0, rng.gaussian() * 0.05};
      reps.push_back(rep);
      speakers.push_back(a ? "alice" : "bob");
    }
    const auto report = speaker_probe(reps, speakers, 5, "global");
    CHECK(report.accuracy == doctest::Approx(1.0));
    CHECK(report.num_speakers == 2);
    CHECK(report.representation == "global");
  }
  SUBCASE("shuffled labels probe to chance") {
    Rng rng(77);
    std::vector<std::vector<double>> reps;
    std::vector<std::string> speakers;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      reps.push_back({rng.gaussian(), rng.gaussian(), rng.gaussian()});
      speakers.push_back(i % 2 == 0 ? "a" : "b");  // labels independent of reps
    }
    const auto report = speaker_probe(reps, speakers, 6, "local");
    const double sigma = std::sqrt(0.25 / report.test_size);
    CHECK(std::abs(report.accuracy - 0.5) < 3.0 * sigma);
  }
  SUBCASE("single speaker degenerates to accuracy 1 with a warning flag") {
    std::vector<std::vector<double>> reps = {{1.0}, {2.0}, {3.0}};
    std::vector<std::string> speakers = {"solo", "solo", "solo"};
    const auto report = speaker_probe(reps, speakers, 1, "global");
    CHECK(report.accuracy == doctest::Approx(1.0));
    CHECK(report.degenerate_single_speaker);
  }
  SUBCASE("a speaker with one utterance cannot be stratified") {
    std::vector<std::vector<double>> reps = {{1.0}, {2.0}, {3.0}};
    std::vector<std::string> speakers = {"a", "a", "lonely"};
    CHECK_THROWS_WITH_AS(speaker_probe(reps, speakers, 1, "global"),
                         doctest::Contains("lonely"), ValidationError);
  }
}

TEST_CASE("unit histogram pooling") {
  const auto hist = unit_histogram(units_of({0, 0, 1, 3}), 4);
  CHECK(hist[0] == doctest::Approx(0.5));
  CHECK(hist[1] == doctest::Approx(0.25));
  CHECK(hist[2] == doctest::Approx(0.0));
  CHECK(hist[3] == doctest::Approx(0.25));
}

TEST_CASE("noise sweep on a kmeans quantizer") {
  TempDir tmp("sweep");
  SyntheticSpec spec;
  spec.num_utterances = 30;
  spec.num_phonemes = 4;
  spec.num_speakers = 2;
  spec.feature_dim = 8;
  spec.seed = 50;
  const auto manifest = synthesize_corpus(spec, tmp.path() / "corpus");
  const auto records = load_manifest(manifest);
  const Mat frames = stack_corpus_frames(records, manifest.parent_path());
  const KMeansModel km = kmeans_fit(frames, 4, 3);
  const KMeansQuantizer q(km);

  SUBCASE("a single identity level gives a zero curve") {
    const auto curve = noise_sweep(q, manifest, {0.0}, 1);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].metric == doctest::Approx(0.0));
  }
  SUBCASE("mean UED grows with the noise level") {
    // Levels chosen across the degradation knee of this corpus; below ~0.5
    // the centroids are far enough apart that no assignment flips.
    const std::vector<double> levels = {0.5, 0.6, 0.8, 1.0, 1.25};
    const auto curve = noise_sweep(q, manifest, levels, 1);
    REQUIRE(curve.size() == levels.size());
    std::vector<double> xs, ys;
    for (const auto& pt : curve) {
      xs.push_back(pt.level);
      ys.push_back(pt.metric);
    }
    CHECK(spearman_rank_correlation(xs, ys) > 0.9);
  }
  SUBCASE("empty level list is rejected") {
    CHECK_THROWS_AS(noise_sweep(q, manifest, {}, 1), ValidationError);
  }
}

TEST_CASE("ued_corpus with identity augmentation is zero") {
  TempDir tmp("ued_id");
  SyntheticSpec spec;
  spec.num_utterances = 10;
  spec.num_phonemes = 3;
  spec.num_speakers = 1;
  spec.feature_dim = 6;
  spec.seed = 51;
  const auto manifest = synthesize_corpus(spec, tmp.path() / "corpus");
  const auto records = load_manifest(manifest);
  const Mat frames = stack_corpus_frames(records, manifest.parent_path());
  const KMeansModel km = kmeans_fit(frames, 3, 3);
  const KMeansQuantizer q(km);

  const auto identity_report = ued_corpus(q, manifest, AugmentSpec::identity(), 2);
  CHECK(identity_report.mean == doctest::Approx(0.0));
  const auto zero_noise = ued_corpus(q, manifest, AugmentSpec::feature_noise(0.0, 0.0), 2);
  CHECK(zero_noise.mean == doctest::Approx(0.0));
  CHECK(identity_report.per_utterance.size() == 10);
}

TEST_CASE("spearman rank correlation") {
  CHECK(spearman_rank_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_rank_correlation({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
  const double mid = spearman_rank_correlation({1, 2, 3, 4}, {1, 3, 2, 4});
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

}  // TEST_SUITE
