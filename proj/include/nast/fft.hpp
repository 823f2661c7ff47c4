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

#ifndef NAST_FFT_H_
#define NAST_FFT_H_

#include <complex>
#include <vector>

namespace nast {

// In-place iterative radix-2 FFT. n must be a power of two.
// inverse=true applies the 1/n scaling.
void fft(std::vector<std::complex<double>>& x, bool inverse);

// Magnitude spectrum of a real signal zero-padded to n (power of two).
// Returns n/2+1 magnitudes.
std::vector<double> magnitude_spectrum(const std::vector<double>& signal, size_t n);

bool is_power_of_two(size_t n);
size_t next_power_of_two(size_t n);

}  // namespace nast

#endif  // NAST_FFT_H_
