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

#include "nast/units.hpp"

#include <fstream>
#include <sstream>

#include "nast/common.hpp"

namespace nast {

UnitSequence dedup(const UnitSequence& z) {
  UnitSequence out;
  out.utterance_id = z.utterance_id;
  for (int u : z.units) {
    if (out.units.empty() || out.units.back() != u) out.units.push_back(u);
  }
  return out;
}

void write_unit_file(const std::vector<UnitSequence>& seqs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (const auto& seq : seqs) {
    out << seq.utterance_id << '\t';
    for (size_t i = 0; i < seq.units.size(); ++i) {
      if (i) out << ' ';
      out << seq.units[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<UnitSequence> read_unit_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open unit file: " + path.string());
  std::vector<UnitSequence> seqs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw FormatError("unit file line " + std::to_string(line_no) + ": missing tab separator");
    UnitSequence seq;
    seq.utterance_id = line.substr(0, tab);
    std::istringstream is(line.substr(tab + 1));
    int v;
    while (is >> v) {
      if (v < 0)
        throw FormatError("unit file line " + std::to_string(line_no) + ": negative unit id");
      seq.units.push_back(v);
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

}  // namespace nast
