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

#include "nast/checkpoint.hpp"

#include <fstream>

#include "nast/common.hpp"
#include "nast/featureio.hpp"

namespace nast {

namespace {

constexpr uint32_t kContainerVersion = 1;

void wr_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t rd_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("truncated container: " + path);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void write_container(const std::filesystem::path& path, const std::string& magic,
                     const Container& c) {
  if (magic.size() != 8) throw ConfigError("container magic must be 8 bytes");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(magic.data(), 8);
  wr_u32(out, kContainerVersion);
  wr_u32(out, static_cast<uint32_t>(c.json_text.size()));
  out.write(c.json_text.data(), static_cast<std::streamsize>(c.json_text.size()));
  wr_u32(out, static_cast<uint32_t>(c.tensors.size()));
  for (const auto& [name, value] : c.tensors) {
    wr_u32(out, static_cast<uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_feature_blob(out, value);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Container read_container(const std::filesystem::path& path, const std::string& magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char file_magic[8];
  in.read(file_magic, 8);
  if (!in || std::string(file_magic, 8) != magic)
    throw FormatError("bad magic (expected " + magic + "): " + path.string());
  const uint32_t version = rd_u32(in, path.string());
  if (version != kContainerVersion)
    throw FormatError("unsupported container version " + std::to_string(version) + ": " +
                      path.string());

  Container c;
  const uint32_t json_len = rd_u32(in, path.string());
  c.json_text.resize(json_len);
  in.read(c.json_text.data(), json_len);
  if (static_cast<uint32_t>(in.gcount()) != json_len)
    throw FormatError("truncated container: " + path.string());

  const uint32_t count = rd_u32(in, path.string());
  c.tensors.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = rd_u32(in, path.string());
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (static_cast<uint32_t>(in.gcount()) != name_len)
      throw FormatError("truncated container: " + path.string());
    FloatMat value = read_feature_blob(in, path.string() + " [" + name + "]");
    c.tensors.emplace_back(std::move(name), std::move(value));
  }
  return c;
}

}  // namespace nast
