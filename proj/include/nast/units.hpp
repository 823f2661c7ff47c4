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

#ifndef NAST_UNITS_H_
#define NAST_UNITS_H_

#include <filesystem>
#include <string>
#include <vector>

namespace nast {

struct UnitSequence {
  std::vector<int> units;  // each in [0, k)
  std::string utterance_id;
};

// Collapses consecutive repeats: [5,5,2,2,2,5] -> [5,2,5].
UnitSequence dedup(const UnitSequence& z);

// Unit file: UTF-8, one line per utterance, `id<TAB>u1 u2 u3 ...`.
void write_unit_file(const std::vector<UnitSequence>& seqs, const std::filesystem::path& path);
std::vector<UnitSequence> read_unit_file(const std::filesystem::path& path);

}  // namespace nast

#endif  // NAST_UNITS_H_
