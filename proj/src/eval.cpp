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

#include "nast/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "nast/common.hpp"

namespace nast {

namespace fs = std::filesystem;

int64_t levenshtein(const UnitSequence& a, const UnitSequence& b) {
  const size_t la = a.units.size();
  const size_t lb = b.units.size();
  std::vector<int64_t> prev(lb + 1), cur(lb + 1);
  for (size_t j = 0; j <= lb; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 0; i < la; ++i) {
    cur[0] = static_cast<int64_t>(i) + 1;
    for (size_t j = 0; j < lb; ++j) {
      const int64_t subst = prev[j] + (a.units[i] == b.units[j] ? 0 : 1);
      cur[j + 1] = std::min({cur[j] + 1, prev[j + 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

double unit_edit_distance(const UnitSequence& clean, const UnitSequence& aug) {
  const UnitSequence dc = dedup(clean);
  const UnitSequence da = dedup(aug);
  const int64_t dist = levenshtein(dc, da);
  const int64_t denom = std::max<int64_t>(1, static_cast<int64_t>(dc.units.size()));
  return 100.0 * static_cast<double>(dist) / static_cast<double>(denom);
}

UedReport ued_from_units(const std::vector<UnitSequence>& clean,
                         const std::vector<UnitSequence>& aug, const std::string& augmentation) {
  if (clean.size() != aug.size())
    throw ValidationError("ued: clean and augmented unit lists differ in length");
  UedReport report;
  report.augmentation = augmentation;
  double sum = 0.0;
  int64_t pooled_edits = 0, pooled_len = 0;
  for (size_t i = 0; i < clean.size(); ++i) {
    const UnitSequence dc = dedup(clean[i]);
    const UnitSequence da = dedup(aug[i]);
    const int64_t dist = levenshtein(dc, da);
    const double ued =
        100.0 * static_cast<double>(dist) /
        static_cast<double>(std::max<int64_t>(1, static_cast<int64_t>(dc.units.size())));
    report.per_utterance.push_back({clean[i].utterance_id, ued});
    sum += ued;
    pooled_edits += dist;
    pooled_len += static_cast<int64_t>(dc.units.size());
  }
  report.mean = clean.empty() ? 0.0 : sum / static_cast<double>(clean.size());
  report.pooled = 100.0 * static_cast<double>(pooled_edits) /
                  static_cast<double>(std::max<int64_t>(1, pooled_len));
  return report;
}

UedReport ued_corpus(const Quantizer& quantizer, const fs::path& manifest, const AugmentSpec& spec,
                     uint64_t seed) {
  const auto records = load_manifest(manifest, /*validate=*/false);
  const fs::path dir = manifest.parent_path();
  Rng rng(seed);
  std::vector<UnitSequence> clean_units, aug_units;
  clean_units.reserve(records.size());
  for (const auto& rec : records) {
    FeatureSequence seq = load_record_features(rec, dir);
    FeatureSequence augmented = apply_feature_augment(seq, spec, rng);
    try {
      clean_units.push_back(quantizer.tokenize(seq));
      aug_units.push_back(quantizer.tokenize(augmented));
    } catch (const Error& e) {
      throw ValidationError("ued: utterance '" + rec.utterance_id + "': " + e.what());
    }
  }
  return ued_from_units(clean_units, aug_units, augment_kind_name(spec.kind));
}

UsageStats unit_usage_stats(const std::vector<UnitSequence>& seqs, int64_t k) {
  if (k < 1) throw ConfigError("unit_usage_stats: k must be >= 1");
  UsageStats stats;
  stats.counts.assign(static_cast<size_t>(k), 0);
  for (const auto& seq : seqs) {
    for (int u : seq.units) {
      if (u < 0 || u >= k)
        throw ValidationError("unit id " + std::to_string(u) + " out of range for k=" +
                              std::to_string(k) + " in '" + seq.utterance_id + "'");
      ++stats.counts[static_cast<size_t>(u)];
      ++stats.total;
    }
  }
  if (stats.total == 0) return stats;
  double h = 0.0;
  for (int64_t c : stats.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(stats.total);
    h -= p * std::log(p);
  }
  stats.entropy_nats = h;
  stats.normalized_entropy = k > 1 ? h / std::log(static_cast<double>(k)) : 0.0;
  return stats;
}

PurityReport phoneme_purity(const std::vector<UnitSequence>& units,
                            const std::vector<UtteranceRecord>& records, int64_t k) {
  if (units.size() != records.size())
    throw ValidationError("phoneme_purity: unit list and manifest differ in length");

  int max_label = -1;
  for (const auto& rec : records) {
    if (!rec.phoneme_labels)
      throw ValidationError("phoneme_purity: utterance '" + rec.utterance_id +
                            "' has no phoneme labels");
    for (int l : *rec.phoneme_labels) max_label = std::max(max_label, l);
  }
  const int64_t p = static_cast<int64_t>(max_label) + 1;
  if (p < 1) throw ValidationError("phoneme_purity: empty label set");

  PurityReport report;
  report.confusion.assign(static_cast<size_t>(k), std::vector<int64_t>(static_cast<size_t>(p), 0));
  int64_t total = 0;
  for (size_t i = 0; i < units.size(); ++i) {
    const auto& z = units[i].units;
    const auto& labels = *records[i].phoneme_labels;
    if (z.size() != labels.size())
      throw ValidationError("phoneme_purity: utterance '" + records[i].utterance_id +
                            "' has " + std::to_string(z.size()) + " units but " +
                            std::to_string(labels.size()) + " labels");
    for (size_t t = 0; t < z.size(); ++t) {
      if (z[t] < 0 || z[t] >= k) throw ValidationError("phoneme_purity: unit id out of range");
      if (labels[t] < 0) throw ValidationError("phoneme_purity: negative label");
      ++report.confusion[static_cast<size_t>(z[t])][static_cast<size_t>(labels[t])];
      ++total;
    }
  }
  if (total == 0) throw ValidationError("phoneme_purity: no frames");

  // Mutual information and entropies from the joint counts.
  const double n = static_cast<double>(total);
  std::vector<double> pu(static_cast<size_t>(k), 0.0), pp(static_cast<size_t>(p), 0.0);
  for (int64_t u = 0; u < k; ++u)
    for (int64_t l = 0; l < p; ++l) {
      const double c = static_cast<double>(report.confusion[static_cast<size_t>(u)][static_cast<size_t>(l)]);
      pu[static_cast<size_t>(u)] += c / n;
      pp[static_cast<size_t>(l)] += c / n;
    }
  double hu = 0.0, hp = 0.0, mi = 0.0;
  for (double q : pu)
    if (q > 0.0) hu -= q * std::log(q);
  for (double q : pp)
    if (q > 0.0) hp -= q * std::log(q);
  for (int64_t u = 0; u < k; ++u)
    for (int64_t l = 0; l < p; ++l) {
      const double c = static_cast<double>(report.confusion[static_cast<size_t>(u)][static_cast<size_t>(l)]);
      if (c == 0.0) continue;
      const double joint = c / n;
      mi += joint * std::log(joint / (pu[static_cast<size_t>(u)] * pp[static_cast<size_t>(l)]));
    }

  if (hu + hp <= 0.0) {
    report.nmi = 1.0;  // both labelings constant: trivially identical structure
  } else {
    report.nmi = std::clamp(mi / (0.5 * (hu + hp)), 0.0, 1.0);
  }

  int64_t correct = 0;
  for (int64_t u = 0; u < k; ++u) {
    int64_t best = 0;
    for (int64_t l = 0; l < p; ++l)
      best = std::max(best, report.confusion[static_cast<size_t>(u)][static_cast<size_t>(l)]);
    correct += best;
  }
  report.frame_accuracy_best_map = static_cast<double>(correct) / n;
  return report;
}

std::vector<double> unit_histogram(const UnitSequence& z, int64_t k) {
  std::vector<double> hist(static_cast<size_t>(k), 0.0);
  for (int u : z.units) {
    if (u < 0 || u >= k) throw ValidationError("unit_histogram: unit id out of range");
    hist[static_cast<size_t>(u)] += 1.0;
  }
  if (!z.units.empty())
    for (auto& v : hist) v /= static_cast<double>(z.units.size());
  return hist;
}

ProbeReport speaker_probe(const std::vector<std::vector<double>>& representations,
                          const std::vector<std::string>& speakers, uint64_t seed,
                          const std::string& representation_name) {
  if (representations.size() != speakers.size() || representations.empty())
    throw ValidationError("speaker_probe: representation/speaker lists are inconsistent");

  // Class ids in first-appearance order.
  std::vector<std::string> class_names;
  std::vector<int> labels(speakers.size());
  for (size_t i = 0; i < speakers.size(); ++i) {
    auto it = std::find(class_names.begin(), class_names.end(), speakers[i]);
    if (it == class_names.end()) {
      class_names.push_back(speakers[i]);
      labels[i] = static_cast<int>(class_names.size()) - 1;
    } else {
      labels[i] = static_cast<int>(it - class_names.begin());
    }
  }
  const int num_classes = static_cast<int>(class_names.size());

  ProbeReport report;
  report.representation = representation_name;
  report.num_speakers = num_classes;

  if (num_classes == 1) {
    log_info("speaker_probe: single speaker, accuracy trivially 1.0");
    report.degenerate_single_speaker = true;
    report.accuracy = 1.0;
    report.train_size = static_cast<int>(speakers.size());
    report.test_size = 0;
    return report;
  }

  // Stratified 80/20 split.
  Rng rng(seed);
  std::vector<size_t> train_idx, test_idx;
  for (int c = 0; c < num_classes; ++c) {
    std::vector<size_t> members;
    for (size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == c) members.push_back(i);
    if (members.size() < 2)
      throw ValidationError("speaker_probe: speaker '" + class_names[static_cast<size_t>(c)] +
                            "' would be present in only one split");
    for (size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[rng.uniform_index(i)]);
    size_t n_test = std::max<size_t>(1, static_cast<size_t>(std::llround(0.2 * static_cast<double>(members.size()))));
    if (n_test >= members.size()) n_test = members.size() - 1;
    for (size_t i = 0; i < members.size(); ++i)
      (i < n_test ? test_idx : train_idx).push_back(members[i]);
  }
  report.train_size = static_cast<int>(train_idx.size());
  report.test_size = static_cast<int>(test_idx.size());

  const size_t dim = representations[0].size();
  for (const auto& r : representations)
    if (r.size() != dim) throw ValidationError("speaker_probe: ragged representation dims");

  // Standardize on train statistics.
  std::vector<double> mean(dim, 0.0), stdev(dim, 0.0);
  for (size_t i : train_idx)
    for (size_t d = 0; d < dim; ++d) mean[d] += representations[i][d];
  for (auto& m : mean) m /= static_cast<double>(train_idx.size());
  for (size_t i : train_idx)
    for (size_t d = 0; d < dim; ++d) {
      const double delta = representations[i][d] - mean[d];
      stdev[d] += delta * delta;
    }
  for (auto& s : stdev) s = std::sqrt(s / static_cast<double>(train_idx.size()));
  auto standardized = [&](size_t i, size_t d) {
    return stdev[d] > 1e-12 ? (representations[i][d] - mean[d]) / stdev[d] : 0.0;
  };

  // Full-batch softmax regression with a fixed budget.
  const int epochs = 300;
  const double lr = 0.5;
  std::vector<double> w(static_cast<size_t>(num_classes) * dim, 0.0);
  std::vector<double> b(static_cast<size_t>(num_classes), 0.0);
  std::vector<double> logits(static_cast<size_t>(num_classes));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::vector<double> gw(w.size(), 0.0), gb(b.size(), 0.0);
    for (size_t i : train_idx) {
      double mx = -1e300;
      for (int c = 0; c < num_classes; ++c) {
        double acc = b[static_cast<size_t>(c)];
        for (size_t d = 0; d < dim; ++d) acc += w[static_cast<size_t>(c) * dim + d] * standardized(i, d);
        logits[static_cast<size_t>(c)] = acc;
        mx = std::max(mx, acc);
      }
      double z = 0.0;
      for (int c = 0; c < num_classes; ++c) z += std::exp(logits[static_cast<size_t>(c)] - mx);
      for (int c = 0; c < num_classes; ++c) {
        const double prob = std::exp(logits[static_cast<size_t>(c)] - mx) / z;
        const double err = prob - (labels[i] == c ? 1.0 : 0.0);
        gb[static_cast<size_t>(c)] += err;
        for (size_t d = 0; d < dim; ++d)
          gw[static_cast<size_t>(c) * dim + d] += err * standardized(i, d);
      }
    }
    const double inv_n = 1.0 / static_cast<double>(train_idx.size());
    for (size_t j = 0; j < w.size(); ++j) w[j] -= lr * gw[j] * inv_n;
    for (size_t j = 0; j < b.size(); ++j) b[j] -= lr * gb[j] * inv_n;
  }

  int correct = 0;
  for (size_t i : test_idx) {
    int best = 0;
    double best_score = -1e300;
    for (int c = 0; c < num_classes; ++c) {
      double acc = b[static_cast<size_t>(c)];
      for (size_t d = 0; d < dim; ++d) acc += w[static_cast<size_t>(c) * dim + d] * standardized(i, d);
      if (acc > best_score) {
        best_score = acc;
        best = c;
      }
    }
    if (best == labels[i]) ++correct;
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test_idx.size());
  return report;
}

std::vector<SweepPoint> noise_sweep(const Quantizer& quantizer, const fs::path& manifest,
                                    const std::vector<double>& levels, uint64_t seed) {
  if (levels.empty()) throw ValidationError("noise_sweep: empty level list");
  std::vector<SweepPoint> curve;
  curve.reserve(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) {
    const double level = levels[i];
    const AugmentSpec spec = level > 0.0 ? AugmentSpec::feature_noise(level, level)
                                         : AugmentSpec::identity();
    const UedReport report = ued_corpus(quantizer, manifest, spec, seed + i);
    curve.push_back({level, report.mean});
  }
  return curve;
}

double spearman_rank_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("spearman: need two same-length series");
  auto ranks = [](const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (size_t t = i; t <= j; ++t) rank[order[t]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    cov += (rx[i] - mx) * (ry[i] - my);
    vx += (rx[i] - mx) * (rx[i] - mx);
    vy += (ry[i] - my) * (ry[i] - my);
  }
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return cov / std::sqrt(vx * vy);
}

}  // namespace nast
