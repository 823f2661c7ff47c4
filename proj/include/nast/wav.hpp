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

#ifndef NAST_WAV_H_
#define NAST_WAV_H_

#include <filesystem>
#include <vector>

namespace nast {

struct Waveform {
  std::vector<double> samples;  // nominal range [-1, 1]
  int sample_rate_hz = 16000;

  size_t size() const { return samples.size(); }
};

// Single-channel WAV, PCM 16-bit or IEEE float 32-bit.
Waveform read_wav(const std::filesystem::path& path);

// Writes IEEE float 32-bit mono.
void write_wav(const Waveform& w, const std::filesystem::path& path);

}  // namespace nast

#endif  // NAST_WAV_H_
