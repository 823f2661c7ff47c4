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

#ifndef NAST_COMMON_H_
#define NAST_COMMON_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nast {

inline constexpr const char* kVersion = "0.1.0";

// Error categories map 1:1 onto the CLI's machine-parsable failure lines.
enum class ErrorCategory {
  kIo,          // file cannot be opened / written
  kFormat,      // bad magic, version mismatch, truncation
  kValidation,  // inconsistent data (manifest vs. file headers, labels)
  kConfig,      // incompatible configuration (dims, k, checkpoint config)
  kNumeric,     // non-finite values where finite required
  kUsage,       // bad command line
};

const char* error_category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCategory::kIo, m) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& m) : Error(ErrorCategory::kFormat, m) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCategory::kValidation, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCategory::kConfig, m) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error(ErrorCategory::kNumeric, m) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorCategory::kUsage, m) {}
};

// Seeded random source. The generator is std::mt19937_64, whose output
// sequence is fixed by the standard; the distribution transforms are written
// out here because the std:: distributions are implementation-defined and
// would break byte-identical reproducibility across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n >= 1. Rejection-free modulo is fine here:
  // n is tiny relative to 2^64 so the bias is far below reproducibility needs,
  // and the mapping itself is deterministic.
  uint64_t uniform_index(uint64_t n) { return gen_() % n; }

  // Standard normal via Box-Muller (both values used, cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double two_pi = 6.283185307179586476925286766559;
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  // Gumbel(0,1) sample: -log(-log(U)), U clamped away from {0,1}.
  double gumbel() {
    double u = uniform();
    if (u < 1e-300) u = 1e-300;
    if (u > 1.0 - 1e-16) u = 1.0 - 1e-16;
    return -std::log(-std::log(u));
  }

  // Geometric duration with mean `mean` >= 1, support {1, 2, ...}.
  int64_t geometric_duration(double mean) {
    if (mean <= 1.0) return 1;
    const double p = 1.0 / mean;
    int64_t n = 1;
    while (uniform() >= p && n < 100000) ++n;
    return n;
  }

  // Exact state round-trip (textual form is pinned by the standard).
  std::string serialize_state() const {
    std::ostringstream os;
    os << gen_;
    return os.str();
  }

  void restore_state(const std::string& s) {
    std::istringstream is(s);
    is >> gen_;
    if (is.fail()) throw FormatError("rng state string is malformed");
    have_spare_ = false;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Verbosity from NAST_LOG (quiet|info|debug); affects stderr chatter only.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace nast

#endif  // NAST_COMMON_H_
