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

#include "nast/common.hpp"

#include <cstdlib>
#include <iostream>

namespace nast {

const char* error_category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kFormat: return "format";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kUsage: return "usage";
  }
  return "unknown";
}

int log_level() {
  static int level = [] {
    const char* env = std::getenv("NAST_LOG");
    if (env == nullptr) return 1;
    std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[nast] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[nast:debug] " << msg << "\n";
}

}  // namespace nast
