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

#include "nast/augment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>

#include "nast/fft.hpp"

namespace nast {

namespace {

constexpr size_t kWindow = 1024;
constexpr size_t kHop = 256;
constexpr double kPi = 3.14159265358979323846;

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

double wrap_phase(double x) {
  return x - 2.0 * kPi * std::round(x / (2.0 * kPi));
}

double mean_power(const std::vector<double>& s) {
  double acc = 0.0;
  for (double v : s) acc += v * v;
  return s.empty() ? 0.0 : acc / static_cast<double>(s.size());
}

}  // namespace

const char* augment_kind_name(AugmentKind k) {
  switch (k) {
    case AugmentKind::kTimeStretch: return "time_stretch";
    case AugmentKind::kPitchShift: return "pitch_shift";
    case AugmentKind::kNoise: return "noise";
    case AugmentKind::kReverb: return "reverb";
    case AugmentKind::kFeatureWarp: return "feature_warp";
    case AugmentKind::kFeatureNoise: return "feature_noise";
    case AugmentKind::kIdentity: return "identity";
  }
  return "unknown";
}

AugmentKind augment_kind_from_name(const std::string& name) {
  if (name == "time_stretch") return AugmentKind::kTimeStretch;
  if (name == "pitch_shift") return AugmentKind::kPitchShift;
  if (name == "noise") return AugmentKind::kNoise;
  if (name == "reverb") return AugmentKind::kReverb;
  if (name == "feature_warp") return AugmentKind::kFeatureWarp;
  if (name == "feature_noise") return AugmentKind::kFeatureNoise;
  if (name == "identity") return AugmentKind::kIdentity;
  throw ConfigError("unknown augmentation kind: " + name);
}

AugmentSpec AugmentSpec::time_stretch(double lo, double hi) {
  AugmentSpec s;
  s.kind = AugmentKind::kTimeStretch;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

AugmentSpec AugmentSpec::pitch_shift(double semitones) {
  AugmentSpec s;
  s.kind = AugmentKind::kPitchShift;
  s.lo = s.hi = semitones;
  s.validate();
  return s;
}

AugmentSpec AugmentSpec::noise(double snr_lo, double snr_hi, std::string noise_path) {
  AugmentSpec s;
  s.kind = AugmentKind::kNoise;
  s.lo = snr_lo;
  s.hi = snr_hi;
  s.path = std::move(noise_path);
  s.validate();
  return s;
}

AugmentSpec AugmentSpec::reverb(std::string rir_path) {
  AugmentSpec s;
  s.kind = AugmentKind::kReverb;
  s.path = std::move(rir_path);
  return s;
}

AugmentSpec AugmentSpec::feature_warp(double lo, double hi) {
  AugmentSpec s;
  s.kind = AugmentKind::kFeatureWarp;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

AugmentSpec AugmentSpec::feature_noise(double lo, double hi) {
  AugmentSpec s;
  s.kind = AugmentKind::kFeatureNoise;
  s.lo = lo;
  s.hi = hi;
  s.validate();
  return s;
}

AugmentSpec AugmentSpec::identity() {
  AugmentSpec s;
  s.kind = AugmentKind::kIdentity;
  return s;
}

void AugmentSpec::validate() const {
  if (lo > hi) throw ConfigError("augment spec: lo > hi");
  switch (kind) {
    case AugmentKind::kTimeStretch:
    case AugmentKind::kFeatureWarp:
      if (lo < 0.8 || hi > 1.2)
        throw ConfigError("stretch/warp factor range must lie within [0.8, 1.2]");
      break;
    case AugmentKind::kFeatureNoise:
      if (lo < 0.0) throw ConfigError("feature-noise scale must be non-negative");
      break;
    default:
      break;
  }
}

Waveform time_stretch(const Waveform& w, double r) {
  if (r <= 0.0) throw ConfigError("time_stretch: rate must be > 0");
  const size_t n = w.samples.size();
  if (n < kWindow)
    throw ValidationError("time_stretch: signal shorter than one analysis window (" +
                          std::to_string(kWindow) + " samples)");

  const size_t syn_hop = std::max<size_t>(1, static_cast<size_t>(std::llround(kHop / r)));
  const size_t out_len = std::max<size_t>(1, static_cast<size_t>(std::llround(n / r)));
  const size_t num_frames = (n - kWindow + kHop - 1) / kHop + 1;

  static const std::vector<double> window = hann_window(kWindow);

  std::vector<double> out(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);
  std::vector<double> prev_phase(kWindow, 0.0);
  std::vector<double> syn_phase(kWindow, 0.0);
  std::vector<std::complex<double>> spec(kWindow);

  for (size_t m = 0; m < num_frames; ++m) {
    const size_t pos = m * kHop;
    for (size_t i = 0; i < kWindow; ++i) {
      const size_t src = pos + i;
      const double v = src < n ? w.samples[src] : 0.0;
      spec[i] = {v * window[i], 0.0};
    }
    fft(spec, false);

    for (size_t k = 0; k < kWindow; ++k) {
      const double mag = std::abs(spec[k]);
      const double phase = std::arg(spec[k]);
      const double omega = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(kWindow);
      if (m == 0) {
        syn_phase[k] = phase;
      } else {
        const double deviation = wrap_phase(phase - prev_phase[k] - omega * static_cast<double>(kHop));
        const double inst_freq = omega + deviation / static_cast<double>(kHop);
        syn_phase[k] += static_cast<double>(syn_hop) * inst_freq;
      }
      prev_phase[k] = phase;
      spec[k] = std::polar(mag, syn_phase[k]);
    }

    fft(spec, true);
    const size_t out_pos = m * syn_hop;
    for (size_t i = 0; i < kWindow; ++i) {
      const size_t dst = out_pos + i;
      if (dst >= out_len) break;
      out[dst] += spec[i].real() * window[i];
      norm[dst] += window[i] * window[i];
    }
  }

  Waveform result;
  result.sample_rate_hz = w.sample_rate_hz;
  result.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i)
    result.samples[i] = norm[i] > 1e-9 ? out[i] / norm[i] : 0.0;
  return result;
}

Waveform pitch_shift(const Waveform& w, double semitones) {
  const double factor = std::pow(2.0, semitones / 12.0);
  // Stretch so the resampling step brings the duration back to ~N while the
  // frequencies scale by `factor`.
  Waveform stretched = time_stretch(w, 1.0 / factor);

  const size_t m = stretched.samples.size();
  const size_t out_len = m >= 1 ? static_cast<size_t>(std::floor(static_cast<double>(m - 1) / factor)) + 1 : 0;
  Waveform result;
  result.sample_rate_hz = w.sample_rate_hz;
  result.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i) {
    const double s = static_cast<double>(i) * factor;
    const size_t i0 = static_cast<size_t>(s);
    const double frac = s - static_cast<double>(i0);
    const double a = stretched.samples[i0];
    const double b = i0 + 1 < m ? stretched.samples[i0 + 1] : a;
    result.samples[i] = a + frac * (b - a);
  }
  return result;
}

Waveform inject_noise(const Waveform& w, const Waveform& noise, double snr_db) {
  if (w.samples.empty() || noise.samples.empty())
    throw ValidationError("inject_noise: empty signal or noise");

  const size_t n = w.samples.size();
  std::vector<double> looped(n);
  for (size_t i = 0; i < n; ++i) looped[i] = noise.samples[i % noise.samples.size()];

  const double p_signal = mean_power(w.samples);
  const double p_noise = mean_power(looped);
  if (p_signal <= 0.0) throw ValidationError("inject_noise: silent signal");
  if (p_noise <= 0.0) throw ValidationError("inject_noise: silent noise");

  const double alpha = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
  Waveform result;
  result.sample_rate_hz = w.sample_rate_hz;
  result.samples.resize(n);
  for (size_t i = 0; i < n; ++i) result.samples[i] = w.samples[i] + alpha * looped[i];
  return result;
}

Waveform apply_reverb(const Waveform& w, const Waveform& rir) {
  if (rir.samples.empty()) throw ValidationError("apply_reverb: empty impulse response");
  if (rir.sample_rate_hz != w.sample_rate_hz)
    throw ValidationError("apply_reverb: sample-rate mismatch (" +
                          std::to_string(w.sample_rate_hz) + " vs " +
                          std::to_string(rir.sample_rate_hz) + ")");

  const size_t n = w.samples.size();
  const size_t k = rir.samples.size();
  std::vector<double> conv(n, 0.0);  // full convolution truncated to n
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const size_t jmax = std::min(k - 1, i);
    for (size_t j = 0; j <= jmax; ++j) acc += w.samples[i - j] * rir.samples[j];
    conv[i] = acc;
  }

  double in_peak = 0.0, out_peak = 0.0;
  for (double v : w.samples) in_peak = std::max(in_peak, std::abs(v));
  for (double v : conv) out_peak = std::max(out_peak, std::abs(v));
  const double scale = out_peak > 0.0 ? in_peak / out_peak : 1.0;

  Waveform result;
  result.sample_rate_hz = w.sample_rate_hz;
  result.samples.resize(n);
  for (size_t i = 0; i < n; ++i) result.samples[i] = conv[i] * scale;
  return result;
}

FeatureSequence feature_time_warp(const FeatureSequence& seq, double r) {
  // The [0.8, 1.2] augmentation range is enforced on AugmentSpec; the op
  // itself accepts any positive factor (inverse warps are used in tests).
  if (r <= 0.0) throw ConfigError("feature_time_warp: factor must be > 0");
  const int64_t t_in = seq.frames.rows;
  const int64_t d = seq.frames.cols;
  if (t_in < 2 && r != 1.0)
    throw ValidationError("feature_time_warp: need at least 2 frames to resample");
  const int64_t t_out = std::max<int64_t>(1, static_cast<int64_t>(std::llround(t_in / r)));

  FeatureSequence out;
  out.frame_rate_hz = seq.frame_rate_hz;
  out.utterance_id = seq.utterance_id;
  if (t_out == t_in) {
    out.frames = seq.frames;
    return out;
  }

  out.frames = FloatMat(t_out, d);
  for (int64_t t = 0; t < t_out; ++t) {
    const double s = t_out > 1
                         ? static_cast<double>(t) * static_cast<double>(t_in - 1) /
                               static_cast<double>(t_out - 1)
                         : static_cast<double>(t_in - 1) / 2.0;
    const int64_t i0 = std::min<int64_t>(static_cast<int64_t>(s), t_in - 1);
    const int64_t i1 = std::min<int64_t>(i0 + 1, t_in - 1);
    const double frac = s - static_cast<double>(i0);
    for (int64_t c = 0; c < d; ++c) {
      const double a = seq.frames.at(i0, c);
      const double b = seq.frames.at(i1, c);
      out.frames.at(t, c) = static_cast<float>(a + frac * (b - a));
    }
  }
  return out;
}

FeatureSequence feature_noise(const FeatureSequence& seq, double scale, uint64_t seed) {
  if (scale < 0.0) throw ConfigError("feature_noise: scale must be non-negative");
  FeatureSequence out = seq;
  if (scale == 0.0) return out;

  double sq = 0.0;
  for (float v : seq.frames.data) sq += static_cast<double>(v) * static_cast<double>(v);
  const double rms = std::sqrt(sq / static_cast<double>(seq.frames.data.size()));
  const double sigma = scale * rms;

  Rng rng(seed);
  for (auto& v : out.frames.data)
    v = static_cast<float>(static_cast<double>(v) + sigma * rng.gaussian());
  return out;
}

AugmentSpec sample_augmentation(const std::vector<AugmentSpec>& specs, Rng& rng) {
  if (specs.empty()) throw ConfigError("sample_augmentation: empty spec list");
  AugmentSpec chosen = specs[rng.uniform_index(specs.size())];
  if (chosen.hi > chosen.lo) {
    const double v = rng.uniform(chosen.lo, chosen.hi);
    chosen.lo = chosen.hi = v;
  }
  return chosen;
}

FeatureSequence apply_feature_augment(const FeatureSequence& seq, const AugmentSpec& spec, Rng& rng) {
  AugmentSpec s = spec;
  if (s.hi > s.lo) {
    const double v = rng.uniform(s.lo, s.hi);
    s.lo = s.hi = v;
  }
  switch (s.kind) {
    case AugmentKind::kIdentity:
      return seq;
    case AugmentKind::kFeatureWarp:
      return feature_time_warp(seq, s.lo);
    case AugmentKind::kFeatureNoise:
      return feature_noise(seq, s.lo, rng.next_u64());
    default:
      throw ConfigError(std::string("augmentation kind '") + augment_kind_name(s.kind) +
                        "' needs waveforms, not features");
  }
}

Waveform apply_waveform_augment(const Waveform& w, const AugmentSpec& spec, Rng& rng) {
  AugmentSpec s = spec;
  if (s.hi > s.lo) {
    const double v = rng.uniform(s.lo, s.hi);
    s.lo = s.hi = v;
  }
  switch (s.kind) {
    case AugmentKind::kIdentity:
      return w;
    case AugmentKind::kTimeStretch:
      return time_stretch(w, s.lo);
    case AugmentKind::kPitchShift:
      return pitch_shift(w, s.lo);
    case AugmentKind::kNoise: {
      namespace fs = std::filesystem;
      fs::path p(s.path);
      if (p.empty()) throw ConfigError("noise augmentation needs a noise wav path");
      if (fs::is_directory(p)) {
        std::vector<fs::path> wavs;
        for (const auto& e : fs::directory_iterator(p))
          if (e.path().extension() == ".wav") wavs.push_back(e.path());
        std::sort(wavs.begin(), wavs.end());
        if (wavs.empty()) throw ConfigError("no .wav files in noise directory: " + p.string());
        p = wavs[rng.uniform_index(wavs.size())];
      }
      return inject_noise(w, read_wav(p), s.lo);
    }
    case AugmentKind::kReverb: {
      if (s.path.empty()) throw ConfigError("reverb augmentation needs an impulse-response path");
      return apply_reverb(w, read_wav(s.path));
    }
    default:
      throw ConfigError(std::string("augmentation kind '") + augment_kind_name(s.kind) +
                        "' operates on features, not waveforms");
  }
}

}  // namespace nast
