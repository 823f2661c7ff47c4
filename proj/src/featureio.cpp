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

#include "nast/featureio.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nast/common.hpp"

namespace nast {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kMagic[8] = {'N', 'A', 'S', 'T', 'F', 'E', 'A', 'T'};
constexpr uint32_t kFeatureVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_f32_le(std::ostream& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(out, bits);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (num_utterances < 1 || num_phonemes < 1 || num_speakers < 1 || feature_dim < 1)
    throw ConfigError("synthetic spec: all counts must be >= 1");
  if (mean_duration_frames <= 0.0 || prototype_scale <= 0.0)
    throw ConfigError("synthetic spec: mean_duration_frames and prototype_scale must be > 0");
  if (noise_scale < 0.0 || speaker_offset_scale < 0.0)
    throw ConfigError("synthetic spec: scales must be non-negative");
}

void write_feature_blob(std::ostream& out, const FloatMat& m) {
  out.write(kMagic, 8);
  write_u32(out, kFeatureVersion);
  write_u32(out, static_cast<uint32_t>(m.rows));
  write_u32(out, static_cast<uint32_t>(m.cols));
  for (float v : m.data) write_f32_le(out, v);
}

FloatMat read_feature_blob(std::istream& in, const std::string& context) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("bad magic in feature file: " + context);
  uint32_t version = read_u32(in);
  if (!in) throw FormatError("truncated header: " + context);
  if (version != kFeatureVersion)
    throw FormatError("unsupported feature file version " + std::to_string(version) + ": " +
                      context);
  uint32_t t = read_u32(in);
  uint32_t d = read_u32(in);
  if (!in) throw FormatError("truncated header: " + context);

  FloatMat m(t, d);
  const size_t payload = static_cast<size_t>(t) * static_cast<size_t>(d) * 4;
  std::vector<char> raw(payload);
  in.read(raw.data(), static_cast<std::streamsize>(payload));
  if (static_cast<size_t>(in.gcount()) != payload)
    throw FormatError("truncated payload (expected " + std::to_string(payload) + " bytes): " +
                      context);
  for (size_t i = 0; i < m.data.size(); ++i) {
    uint32_t bits = static_cast<uint8_t>(raw[4 * i]) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 1])) << 8) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 2])) << 16) |
                    (static_cast<uint32_t>(static_cast<uint8_t>(raw[4 * i + 3])) << 24);
    float v;
    std::memcpy(&v, &bits, 4);
    m.data[i] = v;
  }
  return m;
}

void write_features(const FeatureSequence& seq, const fs::path& path) {
  if (seq.frames.rows < 1 || seq.frames.cols < 1)
    throw ValidationError("write_features: matrix must be at least 1x1");
  if (!seq.frames.all_finite())
    throw NumericError("write_features: non-finite entries in '" + seq.utterance_id + "'");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_feature_blob(out, seq.frames);
  if (!out) throw IoError("write failed: " + path.string());
}

void read_feature_header(const fs::path& path, int64_t* num_frames, int64_t* dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("bad magic in feature file: " + path.string());
  uint32_t version = read_u32(in);
  if (!in) throw FormatError("truncated header: " + path.string());
  if (version != kFeatureVersion)
    throw FormatError("unsupported feature file version " + std::to_string(version) + ": " +
                      path.string());
  uint32_t t = read_u32(in);
  uint32_t d = read_u32(in);
  if (!in) throw FormatError("truncated header: " + path.string());
  *num_frames = t;
  *dim = d;
}

FeatureSequence read_features(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  FeatureSequence seq;
  seq.frames = read_feature_blob(in, path.string());
  seq.utterance_id = path.stem().string();
  return seq;
}

std::vector<int> read_phoneme_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open phoneme file: " + path.string());
  std::string line;
  std::getline(in, line);
  std::istringstream is(line);
  std::vector<int> labels;
  int v;
  while (is >> v) labels.push_back(v);
  return labels;
}

std::vector<UtteranceRecord> load_manifest(const fs::path& path, bool validate) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  const fs::path dir = path.parent_path();

  std::vector<UtteranceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    UtteranceRecord rec;
    try {
      rec.utterance_id = j.at("id").get<std::string>();
      rec.feature_path = j.at("feature_path").get<std::string>();
      rec.speaker_id = j.at("speaker").get<std::string>();
      rec.num_frames = j.at("num_frames").get<int64_t>();
    } catch (const json::exception& e) {
      throw ValidationError("manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("phoneme_path")) {
      const fs::path ppath = dir / j.at("phoneme_path").get<std::string>();
      rec.phoneme_labels = read_phoneme_file(ppath);
    }
    if (validate) {
      const fs::path fpath = dir / rec.feature_path;
      if (!fs::exists(fpath))
        throw ValidationError("utterance '" + rec.utterance_id + "': dangling feature_path " +
                              rec.feature_path);
      int64_t t = 0, d = 0;
      read_feature_header(fpath, &t, &d);
      if (t != rec.num_frames)
        throw ValidationError("utterance '" + rec.utterance_id + "': manifest num_frames " +
                              std::to_string(rec.num_frames) + " != file header " +
                              std::to_string(t));
    }
    if (rec.phoneme_labels && static_cast<int64_t>(rec.phoneme_labels->size()) != rec.num_frames)
      throw ValidationError("utterance '" + rec.utterance_id + "': phoneme label count " +
                            std::to_string(rec.phoneme_labels->size()) + " != num_frames " +
                            std::to_string(rec.num_frames));
    records.push_back(std::move(rec));
  }
  return records;
}

void write_manifest(const std::vector<UtteranceRecord>& records, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& rec : records) {
    json j;
    j["id"] = rec.utterance_id;
    j["feature_path"] = rec.feature_path;
    j["speaker"] = rec.speaker_id;
    j["num_frames"] = rec.num_frames;
    if (rec.phoneme_labels) {
      // Phoneme files live next to the feature files.
      j["phoneme_path"] = fs::path(rec.feature_path).replace_extension(".phn").string();
    }
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

FeatureSequence load_record_features(const UtteranceRecord& rec, const fs::path& manifest_dir) {
  FeatureSequence seq = read_features(manifest_dir / rec.feature_path);
  seq.utterance_id = rec.utterance_id;
  return seq;
}

std::filesystem::path synthesize_corpus(const SyntheticSpec& spec, const fs::path& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir))
    throw IoError("cannot create output directory: " + out_dir.string());

  Rng rng(spec.seed);
  const int P = spec.num_phonemes;
  const int S = spec.num_speakers;
  const int64_t d = spec.feature_dim;

  // Per-phoneme prototypes and per-speaker offsets, drawn once.
  std::vector<std::vector<double>> prototypes(P, std::vector<double>(d));
  for (auto& proto : prototypes)
    for (auto& v : proto) v = rng.gaussian() * spec.prototype_scale;
  std::vector<std::vector<double>> offsets(S, std::vector<double>(d));
  for (auto& off : offsets)
    for (auto& v : off) v = rng.gaussian() * spec.speaker_offset_scale;

  const fs::path feat_dir = out_dir / "features";
  fs::create_directories(feat_dir, ec);

  std::vector<UtteranceRecord> records;
  records.reserve(spec.num_utterances);
  for (int64_t u = 0; u < spec.num_utterances; ++u) {
    const int speaker = static_cast<int>(rng.uniform_index(S));

    // First-order Markov segment chain: uniform start, next phoneme uniform
    // over the others; geometric segment durations.
    const int num_segments = 6 + static_cast<int>(rng.uniform_index(7));  // 6..12
    std::vector<int> labels;
    int phoneme = static_cast<int>(rng.uniform_index(P));
    for (int s = 0; s < num_segments; ++s) {
      const int64_t duration = rng.geometric_duration(spec.mean_duration_frames);
      for (int64_t f = 0; f < duration; ++f) labels.push_back(phoneme);
      if (P > 1) {
        int next = static_cast<int>(rng.uniform_index(P - 1));
        if (next >= phoneme) ++next;
        phoneme = next;
      }
    }

    const int64_t T = static_cast<int64_t>(labels.size());
    FeatureSequence seq;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "utt%05lld", static_cast<long long>(u));
    seq.utterance_id = idbuf;
    seq.frames = FloatMat(T, d);
    for (int64_t t = 0; t < T; ++t) {
      const auto& proto = prototypes[static_cast<size_t>(labels[static_cast<size_t>(t)])];
      const auto& off = offsets[static_cast<size_t>(speaker)];
      for (int64_t c = 0; c < d; ++c) {
        const double v = proto[static_cast<size_t>(c)] + off[static_cast<size_t>(c)] +
                         rng.gaussian() * spec.noise_scale;
        seq.frames.at(t, c) = static_cast<float>(v);
      }
    }

    const std::string feat_rel = "features/" + seq.utterance_id + ".feat";
    write_features(seq, out_dir / feat_rel);

    std::ofstream phn(feat_dir / (seq.utterance_id + ".phn"));
    if (!phn) throw IoError("cannot write phoneme file for " + seq.utterance_id);
    for (size_t i = 0; i < labels.size(); ++i) {
      if (i) phn << ' ';
      phn << labels[i];
    }
    phn << "\n";

    UtteranceRecord rec;
    rec.utterance_id = seq.utterance_id;
    rec.feature_path = feat_rel;
    rec.speaker_id = "spk" + std::to_string(speaker);
    rec.num_frames = T;
    rec.phoneme_labels = labels;
    records.push_back(std::move(rec));
  }

  const fs::path manifest_path = out_dir / "manifest.jsonl";
  write_manifest(records, manifest_path);
  return manifest_path;
}

}  // namespace nast
