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

#include "nast/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "nast/common.hpp"

namespace nast {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void wr_u16(std::ostream& out, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav: " + path.string());

  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path.string());

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* cid = reinterpret_cast<const char*>(bytes.data() + pos);
    const uint32_t csz = rd_u32(bytes.data() + pos + 4);
    const size_t body = pos + 8;
    if (body + csz > bytes.size()) throw FormatError("truncated chunk in wav: " + path.string());
    if (std::memcmp(cid, "fmt ", 4) == 0) {
      if (csz < 16) throw FormatError("short fmt chunk: " + path.string());
      format = rd_u16(bytes.data() + body);
      channels = rd_u16(bytes.data() + body + 2);
      sample_rate = rd_u32(bytes.data() + body + 4);
      bits = rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(cid, "data", 4) == 0) {
      data_off = body;
      data_len = csz;
    }
    pos = body + csz + (csz & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0) throw FormatError("missing fmt/data chunk: " + path.string());
  if (channels != 1) throw ValidationError("only single-channel wav supported: " + path.string());

  Waveform w;
  w.sample_rate_hz = static_cast<int>(sample_rate);
  if (format == 1 && bits == 16) {
    const size_t n = data_len / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t s = static_cast<int16_t>(rd_u16(bytes.data() + data_off + 2 * i));
      w.samples[i] = static_cast<double>(s) / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    const size_t n = data_len / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = rd_u32(bytes.data() + data_off + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      w.samples[i] = static_cast<double>(f);
    }
  } else {
    throw FormatError("unsupported wav encoding (need PCM16 or float32): " + path.string());
  }
  if (w.samples.empty()) throw ValidationError("empty wav: " + path.string());
  return w;
}

void write_wav(const Waveform& w, const std::filesystem::path& path) {
  if (w.samples.empty()) throw ValidationError("refusing to write empty waveform");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  const uint32_t data_size = static_cast<uint32_t>(w.samples.size() * 4);
  out.write("RIFF", 4);
  wr_u32(out, 36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  wr_u32(out, 16);
  wr_u16(out, 3);  // IEEE float
  wr_u16(out, 1);  // mono
  wr_u32(out, static_cast<uint32_t>(w.sample_rate_hz));
  wr_u32(out, static_cast<uint32_t>(w.sample_rate_hz) * 4);
  wr_u16(out, 4);
  wr_u16(out, 32);
  out.write("data", 4);
  wr_u32(out, data_size);
  for (double s : w.samples) {
    float f = static_cast<float>(s);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    wr_u32(out, bits);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace nast
