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

#ifndef NAST_AUGMENT_H_
#define NAST_AUGMENT_H_

#include <string>
#include <vector>

#include "nast/common.hpp"
#include "nast/featureio.hpp"
#include "nast/wav.hpp"

namespace nast {

enum class AugmentKind {
  kTimeStretch,
  kPitchShift,
  kNoise,
  kReverb,
  kFeatureWarp,
  kFeatureNoise,
  kIdentity,
};

const char* augment_kind_name(AugmentKind k);
AugmentKind augment_kind_from_name(const std::string& name);

// One augmentation with its parameter range. lo == hi denotes a fixed value.
// The meaning of [lo, hi] is kind-specific: speed factor (time_stretch,
// feature_warp), semitones (pitch_shift), SNR dB (noise), noise scale
// relative to feature rms (feature_noise). `path` points at an impulse
// response (reverb) or a noise wav / directory of wavs (noise).
struct AugmentSpec {
  AugmentKind kind = AugmentKind::kIdentity;
  double lo = 0.0;
  double hi = 0.0;
  std::string path;
  uint64_t seed = 0;

  static AugmentSpec time_stretch(double lo = 0.8, double hi = 1.2);
  static AugmentSpec pitch_shift(double semitones = 4.0);
  static AugmentSpec noise(double snr_lo = 5.0, double snr_hi = 15.0, std::string noise_path = "");
  static AugmentSpec reverb(std::string rir_path);
  static AugmentSpec feature_warp(double lo = 0.8, double hi = 1.2);
  static AugmentSpec feature_noise(double lo, double hi);
  static AugmentSpec identity();

  void validate() const;
};

// ------------------------- waveform-level ops -------------------------

// Phase-vocoder time-scale modification: STFT with window 1024, hop 256,
// Hann; per-bin phase advancement by accumulated instantaneous frequency;
// synthesis hop round(256/r); inverse STFT with overlap-add renormalization.
// r is a speed factor: output length is round(N/r).
Waveform time_stretch(const Waveform& w, double r);

// Pitch shift by `semitones` via time-stretch followed by linear-interpolation
// resampling, restoring the original duration.
Waveform pitch_shift(const Waveform& w, double semitones);

// out = w + alpha * noise, alpha chosen so the mix hits snr_db exactly.
// The noise loops or truncates to len(w).
Waveform inject_noise(const Waveform& w, const Waveform& noise, double snr_db);

// Full convolution with the impulse response, truncated to len(w) and
// peak-normalized to the input's max amplitude.
Waveform apply_reverb(const Waveform& w, const Waveform& rir);

// ------------------------- feature-level analogs -------------------------

// Linear interpolation along time to T' = round(T/r) frames.
FeatureSequence feature_time_warp(const FeatureSequence& seq, double r);

// Adds i.i.d. Gaussian noise with std = scale * rms(frames).
FeatureSequence feature_noise(const FeatureSequence& seq, double scale, uint64_t seed);

// ------------------------- sampling -------------------------

// Uniform choice over specs; range parameters are concretized (lo == hi on
// the returned spec) by uniform draws from rng.
AugmentSpec sample_augmentation(const std::vector<AugmentSpec>& specs, Rng& rng);

// Applies a (concretized or ranged) spec to a feature sequence. Waveform-only
// kinds raise ConfigError.
FeatureSequence apply_feature_augment(const FeatureSequence& seq, const AugmentSpec& spec, Rng& rng);

// Applies a waveform-kind spec. Feature-only kinds raise ConfigError.
Waveform apply_waveform_augment(const Waveform& w, const AugmentSpec& spec, Rng& rng);

}  // namespace nast

#endif  // NAST_AUGMENT_H_
