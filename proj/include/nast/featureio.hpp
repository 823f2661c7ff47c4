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

#ifndef NAST_FEATUREIO_H_
#define NAST_FEATUREIO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nast/matrix.hpp"

namespace nast {

// Framed feature sequence, one row per frame. Values are float32 on disk and
// in memory so that write/read round-trips are exact.
struct FeatureSequence {
  FloatMat frames;                // T x d
  double frame_rate_hz = 50.0;    // metadata only, not used by any math
  std::string utterance_id;

  int64_t num_frames() const { return frames.rows; }
  int64_t dim() const { return frames.cols; }
};

struct UtteranceRecord {
  std::string utterance_id;
  std::string feature_path;  // relative to the manifest's directory
  std::string speaker_id;
  std::optional<std::vector<int>> phoneme_labels;  // per frame, when present
  int64_t num_frames = 0;
};

struct SyntheticSpec {
  int64_t num_utterances = 200;
  int num_phonemes = 8;
  int num_speakers = 2;
  int64_t feature_dim = 16;
  double mean_duration_frames = 5.0;
  double prototype_scale = 1.0;
  double noise_scale = 0.1;
  double speaker_offset_scale = 0.5;
  uint64_t seed = 0;

  void validate() const;
};

// Feature file layout (bit-exact):
//   bytes 0-7   magic "NASTFEAT"
//   bytes 8-11  version u32 = 1, little-endian
//   bytes 12-15 T u32
//   bytes 16-19 d u32
//   then T*d IEEE-754 float32 little-endian, row-major.
void write_features(const FeatureSequence& seq, const std::filesystem::path& path);
FeatureSequence read_features(const std::filesystem::path& path);

// The same layout on an open stream; checkpoints embed parameter matrices
// as these blobs.
void write_feature_blob(std::ostream& out, const FloatMat& m);
FloatMat read_feature_blob(std::istream& in, const std::string& context);

// Reads only the header; used for cheap manifest validation.
void read_feature_header(const std::filesystem::path& path, int64_t* num_frames, int64_t* dim);

// Manifest: UTF-8, one JSON object per line with keys
// id, feature_path, speaker, num_frames, optional phoneme_path.
std::vector<UtteranceRecord> load_manifest(const std::filesystem::path& path, bool validate = false);
void write_manifest(const std::vector<UtteranceRecord>& records, const std::filesystem::path& path);

// Generates a labeled corpus under out_dir and returns the manifest path.
// Deterministic given spec.seed: per-phoneme Gaussian prototypes, per-speaker
// Gaussian offsets, first-order Markov phoneme segments with geometric
// durations, frame emission x_t = prototype + offset + noise.
std::filesystem::path synthesize_corpus(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

// Loads the features referenced by a record (path resolved against manifest_dir).
FeatureSequence load_record_features(const UtteranceRecord& rec, const std::filesystem::path& manifest_dir);

std::vector<int> read_phoneme_file(const std::filesystem::path& path);

}  // namespace nast

#endif  // NAST_FEATUREIO_H_
