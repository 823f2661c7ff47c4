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

#include <doctest.h>

#include <numeric>

#include "nast/augment.hpp"
#include "nast/fft.hpp"
#include "testutil.hpp"

using namespace nast;
using namespace nast::testutil;

namespace {

Waveform make_tone(double freq, int rate, size_t n, double amp = 0.5) {
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples = sine_wave(freq, rate, n, amp);
  return w;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = std::min(a.size(), b.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

double measured_snr_db(const std::vector<double>& clean, const std::vector<double>& mixed) {
  double ps = 0.0, pn = 0.0;
  for (size_t i = 0; i < clean.size(); ++i) {
    ps += clean[i] * clean[i];
    const double noise = mixed[i] - clean[i];
    pn += noise * noise;
  }
  return 10.0 * std::log10(ps / pn);
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("fft matches the direct DFT") {
  Rng rng(3);
  std::vector<std::complex<double>> x(64);
  for (auto& v : x) v = {rng.gaussian(), rng.gaussian()};
  auto expected = dft_oracle(x);
  auto actual = x;
  fft(actual, false);
  for (size_t i = 0; i < x.size(); ++i) {
    CHECK(rel_err(actual[i].real(), expected[i].real()) < 1e-9);
    CHECK(rel_err(actual[i].imag(), expected[i].imag()) < 1e-9);
  }
  fft(actual, true);  // inverse returns the input
  for (size_t i = 0; i < x.size(); ++i) CHECK(rel_err(actual[i].real(), x[i].real()) < 1e-9);
}

TEST_CASE("time_stretch at rate 1 is near-identity") {
  const Waveform tone = make_tone(440.0, 16000, 16000);
  const Waveform out = time_stretch(tone, 1.0);
  CHECK(std::llabs(static_cast<long long>(out.samples.size()) - 16000) <= 256);
  CHECK(correlation(tone.samples, out.samples) > 0.99);
}

TEST_CASE("time_stretch length law and spectral peak") {
  const int rate = 16000;
  const Waveform tone = make_tone(440.0, rate, 16000);
  for (double r : {0.8, 1.2}) {
    CAPTURE(r);
    const Waveform out = time_stretch(tone, r);
    const auto expected_len = static_cast<long long>(std::llround(16000.0 / r));
    const long long hop = std::llround(256.0 / r);
    CHECK(std::llabs(static_cast<long long>(out.samples.size()) - expected_len) <= hop);
    const double peak = dominant_frequency(out.samples, rate, 4096);
    CHECK(std::abs(peak - 440.0) <= rate / 4096.0);
  }
}

TEST_CASE("time_stretch rejects bad inputs") {
  const Waveform tone = make_tone(440.0, 16000, 4096);
  CHECK_THROWS_AS(time_stretch(tone, 0.0), ConfigError);
  CHECK_THROWS_AS(time_stretch(tone, -1.0), ConfigError);
  Waveform tiny;
  tiny.sample_rate_hz = 16000;
  tiny.samples.assign(512, 0.1);
  CHECK_THROWS_AS(time_stretch(tiny, 1.0), ValidationError);
}

TEST_CASE("pitch_shift moves a pure tone by the expected ratio") {
  const int rate = 16000;
  const Waveform tone = make_tone(440.0, rate, 16000);
  const double bin = static_cast<double>(rate) / 4096.0;

  SUBCASE("zero shift preserves everything") {
    const Waveform out = pitch_shift(tone, 0.0);
    CHECK(std::llabs(static_cast<long long>(out.samples.size()) - 16000) <= 256);
    CHECK(std::abs(dominant_frequency(out.samples, rate, 4096) - 440.0) <= bin);
  }
  SUBCASE("+4 semitones lands on 554.4 Hz") {
    const Waveform out = pitch_shift(tone, 4.0);
    const double expected = 440.0 * std::pow(2.0, 4.0 / 12.0);
    CHECK(std::llabs(static_cast<long long>(out.samples.size()) - 16000) <= 512);
    CHECK(std::abs(dominant_frequency(out.samples, rate, 4096) - expected) <= bin);
  }
  SUBCASE("-4 semitones from 554.4 Hz returns to 440 Hz") {
    const Waveform high = make_tone(554.365, rate, 16000);
    const Waveform out = pitch_shift(high, -4.0);
    CHECK(std::abs(dominant_frequency(out.samples, rate, 4096) - 440.0) <= bin);
  }
}

TEST_CASE("inject_noise calibration") {
  Rng rng(17);
  Waveform signal = make_tone(300.0, 16000, 8000, 0.4);
  Waveform noise;
  noise.sample_rate_hz = 16000;
  noise.samples.resize(5000);
  for (auto& v : noise.samples) v = rng.gaussian() * 0.2;

  SUBCASE("equal powers at 0 dB give alpha = 1") {
    Waveform a, b;
    a.sample_rate_hz = b.sample_rate_hz = 16000;
    a.samples.assign(1000, 0.5);
    b.samples.assign(1000, -0.5);
    const Waveform out = inject_noise(a, b, 0.0);
    for (size_t i = 0; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("closed-form alpha at 10 dB") {
    Waveform a, b;
    a.sample_rate_hz = b.sample_rate_hz = 16000;
    a.samples.assign(1000, 1.0);
    b.samples.assign(1000, 1.0);
    const Waveform out = inject_noise(a, b, 10.0);
    const double alpha = out.samples[0] - 1.0;
    CHECK(alpha == doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-9));
  }
  SUBCASE("measured SNR within 0.1 dB across the range") {
    for (double snr : {0.0, 5.0, 10.0, 15.0}) {
      CAPTURE(snr);
      const Waveform out = inject_noise(signal, noise, snr);
      CHECK(std::abs(measured_snr_db(signal.samples, out.samples) - snr) < 0.1);
    }
  }
  SUBCASE("silent noise is rejected") {
    Waveform silent;
    silent.sample_rate_hz = 16000;
    silent.samples.assign(100, 0.0);
    CHECK_THROWS_AS(inject_noise(signal, silent, 10.0), ValidationError);
    CHECK_THROWS_AS(inject_noise(silent, noise, 10.0), ValidationError);
  }
}

TEST_CASE("apply_reverb") {
  Waveform signal;
  signal.sample_rate_hz = 16000;
  signal.samples.resize(512);
  for (size_t i = 0; i < signal.samples.size(); ++i) signal.samples[i] = i < 256 ? 0.0 : 0.5;

  SUBCASE("unit impulse is identity") {
    Waveform rir;
    rir.sample_rate_hz = 16000;
    rir.samples = {1.0};
    const Waveform out = apply_reverb(signal, rir);
    REQUIRE(out.samples.size() == signal.samples.size());
    for (size_t i = 0; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(signal.samples[i]).epsilon(1e-12));
  }
  SUBCASE("delayed impulse shifts the signal") {
    Waveform rir;
    rir.sample_rate_hz = 16000;
    rir.samples.assign(11, 0.0);
    rir.samples[10] = 1.0;
    const Waveform out = apply_reverb(signal, rir);
    for (size_t i = 10; i < out.samples.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(signal.samples[i - 10]).epsilon(1e-12));
  }
  SUBCASE("two-tap kernel matches the direct convolution oracle") {
    Waveform rir;
    rir.sample_rate_hz = 16000;
    rir.samples = {0.5, 0.5};
    const Waveform out = apply_reverb(signal, rir);
    // O(N*K) direct convolution + the same peak normalization.
    std::vector<double> conv(signal.samples.size(), 0.0);
    for (size_t i = 0; i < conv.size(); ++i)
      for (size_t j = 0; j < rir.samples.size() && j <= i; ++j)
        conv[i] += signal.samples[i - j] * rir.samples[j];
    double in_peak = 0.0, out_peak = 0.0;
    for (double v : signal.samples) in_peak = std::max(in_peak, std::abs(v));
    for (double v : conv) out_peak = std::max(out_peak, std::abs(v));
    for (auto& v : conv) v *= in_peak / out_peak;
    for (size_t i = 0; i < conv.size(); ++i)
      CHECK(out.samples[i] == doctest::Approx(conv[i]).epsilon(1e-12));
  }
  SUBCASE("sample-rate mismatch is rejected") {
    Waveform rir;
    rir.sample_rate_hz = 8000;
    rir.samples = {1.0};
    CHECK_THROWS_AS(apply_reverb(signal, rir), ValidationError);
  }
}

TEST_CASE("feature_time_warp") {
  FeatureSequence seq;
  seq.utterance_id = "w";

  SUBCASE("identity rate returns the identical matrix") {
    seq.frames = FloatMat(5, 3);
    for (size_t i = 0; i < seq.frames.data.size(); ++i) seq.frames.data[i] = static_cast<float>(i);
    const FeatureSequence out = feature_time_warp(seq, 1.0);
    CHECK(out.frames.data == seq.frames.data);
  }
  SUBCASE("two frames interpolate to three") {
    seq.frames = FloatMat(2, 1);
    seq.frames.at(0, 0) = 0.0f;
    seq.frames.at(1, 0) = 2.0f;
    const FeatureSequence out = feature_time_warp(seq, 2.0 / 3.0);
    REQUIRE(out.frames.rows == 3);
    CHECK(out.frames.at(0, 0) == doctest::Approx(0.0f));
    CHECK(out.frames.at(1, 0) == doctest::Approx(1.0f));
    CHECK(out.frames.at(2, 0) == doctest::Approx(2.0f));
  }
  SUBCASE("constant sequences stay constant at any rate") {
    seq.frames = FloatMat(10, 2);
    for (auto& v : seq.frames.data) v = 3.25f;
    for (double r : {0.8, 0.9, 1.1, 1.2}) {
      const FeatureSequence out = feature_time_warp(seq, r);
      CHECK(out.frames.rows == static_cast<int64_t>(std::llround(10.0 / r)));
      for (float v : out.frames.data) CHECK(v == doctest::Approx(3.25f));
    }
  }
  SUBCASE("single frame cannot be resampled") {
    seq.frames = FloatMat(1, 2);
    CHECK_THROWS_AS(feature_time_warp(seq, 0.8), ValidationError);
    CHECK_NOTHROW(feature_time_warp(seq, 1.0));
  }
  SUBCASE("warp then inverse warp recovers a time-linear ramp") {
    seq.frames = FloatMat(50, 2);
    for (int64_t t = 0; t < 50; ++t) {
      seq.frames.at(t, 0) = static_cast<float>(t) * 0.1f;
      seq.frames.at(t, 1) = 5.0f - static_cast<float>(t) * 0.02f;
    }
    for (double r : {0.8, 1.2}) {
      const FeatureSequence warped = feature_time_warp(seq, r);
      const FeatureSequence back = feature_time_warp(warped, 1.0 / r);
      REQUIRE(back.frames.rows == seq.frames.rows);
      double max_abs = 0.0;
      for (size_t i = 0; i < back.frames.data.size(); ++i)
        max_abs = std::max(max_abs, std::abs(static_cast<double>(back.frames.data[i]) -
                                             static_cast<double>(seq.frames.data[i])));
      CHECK(max_abs <= 1e-5);
    }
  }
}

TEST_CASE("feature_noise") {
  FeatureSequence seq;
  seq.utterance_id = "n";
  seq.frames = FloatMat(200, 50);
  Rng rng(9);
  for (auto& v : seq.frames.data) v = static_cast<float>(rng.gaussian());

  SUBCASE("zero scale is identity") {
    const FeatureSequence out = feature_noise(seq, 0.0, 4);
    CHECK(out.frames.data == seq.frames.data);
  }
  SUBCASE("same seed gives identical output") {
    const FeatureSequence a = feature_noise(seq, 0.3, 42);
    const FeatureSequence b = feature_noise(seq, 0.3, 42);
    CHECK(a.frames.data == b.frames.data);
  }
  SUBCASE("empirical std tracks scale * rms") {
    double sq = 0.0;
    for (float v : seq.frames.data) sq += static_cast<double>(v) * v;
    const double rms = std::sqrt(sq / static_cast<double>(seq.frames.data.size()));
    const FeatureSequence out = feature_noise(seq, 0.1, 13);
    double diff_sq = 0.0;
    for (size_t i = 0; i < seq.frames.data.size(); ++i) {
      const double d = static_cast<double>(out.frames.data[i]) - seq.frames.data[i];
      diff_sq += d * d;
    }
    const double std_measured = std::sqrt(diff_sq / static_cast<double>(seq.frames.data.size()));
    CHECK(std::abs(std_measured - 0.1 * rms) < 0.05 * 0.1 * rms);
  }
  SUBCASE("negative scale is rejected") {
    CHECK_THROWS_AS(feature_noise(seq, -0.1, 0), ConfigError);
  }
}

TEST_CASE("sample_augmentation") {
  Rng rng(123);
  SUBCASE("single-element list returns that element") {
    std::vector<AugmentSpec> specs = {AugmentSpec::pitch_shift(4.0)};
    const AugmentSpec got = sample_augmentation(specs, rng);
    CHECK(got.kind == AugmentKind::kPitchShift);
    CHECK(got.lo == 4.0);
  }
  SUBCASE("identity-only list returns identity") {
    std::vector<AugmentSpec> specs = {AugmentSpec::identity()};
    CHECK(sample_augmentation(specs, rng).kind == AugmentKind::kIdentity);
  }
  SUBCASE("empty list is rejected") {
    std::vector<AugmentSpec> specs;
    CHECK_THROWS_AS(sample_augmentation(specs, rng), ConfigError);
  }
  SUBCASE("choice frequencies and parameter ranges") {
    std::vector<AugmentSpec> specs = {
        AugmentSpec::time_stretch(0.8, 1.2), AugmentSpec::pitch_shift(4.0),
        AugmentSpec::noise(5.0, 15.0), AugmentSpec::feature_warp(0.8, 1.2)};
    const int n = 10000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) {
      const AugmentSpec got = sample_augmentation(specs, rng);
      switch (got.kind) {
        case AugmentKind::kTimeStretch:
          CHECK(got.lo == got.hi);
          CHECK(got.lo >= 0.8);
          CHECK(got.lo <= 1.2);
          ++counts[0];
          break;
        case AugmentKind::kPitchShift: ++counts[1]; break;
        case AugmentKind::kNoise:
          CHECK(got.lo >= 5.0);
          CHECK(got.lo <= 15.0);
          ++counts[2];
          break;
        case AugmentKind::kFeatureWarp: ++counts[3]; break;
        default: FAIL("unexpected kind");
      }
    }
    // each frequency within 3 sigma of 1/4
    const double sigma = std::sqrt(0.25 * 0.75 / n);
    for (int c : counts)
      CHECK(std::abs(static_cast<double>(c) / n - 0.25) < 3.0 * sigma);
  }
}

TEST_CASE("snr spec validation") {
  CHECK_THROWS_AS(AugmentSpec::noise(15.0, 5.0), ConfigError);
  CHECK_THROWS_AS(AugmentSpec::time_stretch(0.5, 1.0), ConfigError);
  CHECK_NOTHROW(AugmentSpec::noise(5.0, 15.0));
}

}  // TEST_SUITE
