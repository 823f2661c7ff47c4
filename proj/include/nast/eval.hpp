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

#ifndef NAST_EVAL_H_
#define NAST_EVAL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "nast/augment.hpp"
#include "nast/tokenize.hpp"
#include "nast/units.hpp"

namespace nast {

// Unit-cost insert/delete/substitute edit distance.
int64_t levenshtein(const UnitSequence& a, const UnitSequence& b);

// 100 * levenshtein(dedup(clean), dedup(aug)) / max(1, |dedup(clean)|).
double unit_edit_distance(const UnitSequence& clean, const UnitSequence& aug);

struct UedEntry {
  std::string id;
  double ued = 0.0;
};

struct UedReport {
  std::vector<UedEntry> per_utterance;
  double mean = 0.0;
  double pooled = 0.0;  // corpus-pooled edits / pooled deduped-clean length
  std::string augmentation;
};

UedReport ued_from_units(const std::vector<UnitSequence>& clean,
                         const std::vector<UnitSequence>& aug, const std::string& augmentation);

// Tokenizes each utterance clean and augmented (feature-level analog) and
// reports per-pair UED.
UedReport ued_corpus(const Quantizer& quantizer, const std::filesystem::path& manifest,
                     const AugmentSpec& spec, uint64_t seed);

struct UsageStats {
  std::vector<int64_t> counts;        // per unit
  int64_t total = 0;
  double entropy_nats = 0.0;
  double normalized_entropy = 0.0;  // H / ln(k)
};

UsageStats unit_usage_stats(const std::vector<UnitSequence>& seqs, int64_t k);

struct PurityReport {
  double nmi = 0.0;
  double frame_accuracy_best_map = 0.0;
  std::vector<std::vector<int64_t>> confusion;  // k x P
};

// NMI between frame-level unit assignments and phoneme labels; records must
// carry phoneme labels aligned with the unit sequences.
PurityReport phoneme_purity(const std::vector<UnitSequence>& units,
                            const std::vector<UtteranceRecord>& records, int64_t k);

struct ProbeReport {
  std::string representation;  // "local" or "global"
  double accuracy = 0.0;
  int num_speakers = 0;
  int train_size = 0;
  int test_size = 0;
  bool degenerate_single_speaker = false;
};

// Multinomial linear probe, 80/20 stratified split, full-batch gradient
// descent with a fixed epoch budget. Deterministic per seed.
ProbeReport speaker_probe(const std::vector<std::vector<double>>& representations,
                          const std::vector<std::string>& speakers, uint64_t seed,
                          const std::string& representation_name);

// Utterance-level unit histogram (k-dim, normalized): the "local"
// representation for probing. Applies identically to k-means units.
std::vector<double> unit_histogram(const UnitSequence& z, int64_t k);

struct SweepPoint {
  double level = 0.0;
  double metric = 0.0;
};

// Mean UED at each feature-noise level, in the given order.
std::vector<SweepPoint> noise_sweep(const Quantizer& quantizer,
                                    const std::filesystem::path& manifest,
                                    const std::vector<double>& levels, uint64_t seed);

// Spearman rank correlation with average ranks on ties.
double spearman_rank_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nast

#endif  // NAST_EVAL_H_
