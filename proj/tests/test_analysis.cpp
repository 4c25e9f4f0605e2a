// Copyright 2026 The maglev-nmpc Authors
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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "maglev/analysis.hpp"

namespace maglev {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(std::size_t n, double fs, double f, double amp, double offset = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = offset + amp * std::sin(2.0 * kPi * f * static_cast<double>(i) / fs);
  }
  return v;
}

TEST(Rmse, KnownValues) {
  const std::vector<double> v{1.0, -1.0, 3.0, -3.0};
  EXPECT_DOUBLE_EQ(rmse(v, 0.0), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(rmse(v, 1.0), std::sqrt((0.0 + 4.0 + 4.0 + 16.0) / 4.0));
  EXPECT_THROW(rmse(std::vector<double>{}, 0.0), std::invalid_argument);
}

TEST(Histogram, CountsEdgesAndOutliers) {
  const std::vector<double> v{-2.0, -1.0, -0.5, 0.0, 0.49, 0.5, 1.0, 1.5, std::numeric_limits<double>::quiet_NaN()};
  const Histogram h = histogram(v, 4, -1.0, 1.0);
  ASSERT_EQ(h.edges.size(), 5u);
  EXPECT_DOUBLE_EQ(h.edges[0], -1.0);
  EXPECT_DOUBLE_EQ(h.edges[2], 0.0);
  EXPECT_DOUBLE_EQ(h.edges[4], 1.0);
  EXPECT_EQ(h.underflow, 1u);
  EXPECT_EQ(h.overflow, 2u);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 2, 2}));
  EXPECT_THROW(histogram(v, 0, -1.0, 1.0), std::invalid_argument);
}

TEST(Welch, BinCentredSinePeaksAtRmsAmplitude) {
  const double fs = 1000.0;
  const std::size_t L = 1024;
  const double f = 40.0 * fs / L;
  const Spectrum sp = welch_spectrum(sine(8 * L, fs, f, 0.3, 2.0), fs, L, 0.5);
  EXPECT_EQ(sp.segments, 15u);
  EXPECT_DOUBLE_EQ(sp.resolution, fs / L);
  EXPECT_DOUBLE_EQ(sp.frequencies[40], f);
  EXPECT_NEAR(sp.amplitude[40], 0.3 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(sp.amplitude[0], 0.0, 1e-12);
  EXPECT_NEAR(band_rms(sp, f - 3.0, f + 3.0), 0.3 / std::sqrt(2.0), 1e-12);
}

TEST(Welch, SingleSegmentSatisfiesParseval) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n01(0.0, 1.0);
  const std::size_t L = 512;
  std::vector<double> x(L);
  for (auto& v : x) {
    v = n01(rng);
  }
  const Spectrum sp = welch_spectrum(x, 100.0, L, 0.5);
  double mean = 0.0;
  for (double v : x) {
    mean += v / L;
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * i / L));
    num += (x[i] - mean) * (x[i] - mean) * w * w;
    den += w * w;
  }
  double total = 0.0;
  for (double p : sp.power) {
    total += p;
  }
  EXPECT_NEAR(total, num / den, 1e-12 * total);
}

TEST(Welch, WhiteNoisePowerIsFlat) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> n01(0.0, 0.5);
  std::vector<double> x(1 << 16);
  for (auto& v : x) {
    v = n01(rng);
  }
  const Spectrum sp = welch_spectrum(x, 200.0, 256, 0.5);
  EXPECT_NEAR(band_rms(sp, 0.0, 100.0), 0.5, 0.02);
  // Equal bandwidths carry equal variance.
  EXPECT_NEAR(band_rms(sp, 10.0, 30.0) / band_rms(sp, 60.0, 80.0), 1.0, 0.1);
}

TEST(Welch, RejectsInvalidArguments) {
  const std::vector<double> x(100, 1.0);
  EXPECT_THROW(welch_spectrum(x, 1.0, 48, 0.5), std::invalid_argument);
  EXPECT_THROW(welch_spectrum(x, 1.0, 128, 0.5), std::invalid_argument);
  EXPECT_THROW(welch_spectrum(x, 1.0, 64, 1.0), std::invalid_argument);
}

TEST(SegmentLength, LargestPowerOfTwoWithinBothLimits) {
  EXPECT_EQ(effective_segment_length(65536, 300001), 65536u);
  EXPECT_EQ(effective_segment_length(65536, 10000), 8192u);
  EXPECT_EQ(effective_segment_length(4096, 4096), 4096u);
  EXPECT_EQ(effective_segment_length(65536, 3), 2u);
  EXPECT_EQ(effective_segment_length(65536, 1), 0u);
}

RideLog synthetic_log(double f, double amp, std::size_t n, double h) {
  RideLog log;
  log.name = "synthetic";
  log.plantStep = h;
  log.sampleTime = 10 * h;
  log.uMax = 2.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = j * h;
    log.t.push_back(t);
    log.ds.push_back(j % 2 == 0 ? 1e-3 : -1e-3);
    log.a2.push_back(amp * std::sin(2.0 * kPi * f * t));
    log.u.push_back(j % 4 == 0 ? 2.0 : 0.5);
    log.sqpIterations.push_back(3);
    log.solveMs.push_back(j % 20 == 0 ? 1.0 : 3.0);
  }
  return log;
}

TEST(Comfort, BandRmsAndPeakOfASine) {
  const double h = 1e-3;
  const std::size_t L = 16384;
  const double f = 40.0 / (L * h);  // bin-centred, about 2.44 Hz
  const RideLog log = synthetic_log(f, 0.2, 4 * L, h);
  AnalysisOptions opts;
  opts.segmentLength = L;
  const ComfortMetrics c = comfort_metrics(log, 0.5, 5.0, opts);
  EXPECT_NEAR(c.bandRms, 0.2 / std::sqrt(2.0), 1e-10);
  EXPECT_DOUBLE_EQ(c.peakFrequency, f);
  EXPECT_NEAR(c.peakAmplitude, 0.2 / std::sqrt(2.0), 1e-10);
  const ComfortMetrics empty = comfort_metrics(log, 10.0, 20.0, opts);
  EXPECT_LT(empty.bandRms, 1e-10);
}

TEST(Metrics, SummariseALog) {
  const RideLog log = synthetic_log(2.0, 0.2, 4000, 1e-3);
  const RunMetrics m = compute_metrics(log);
  EXPECT_EQ(m.samples, 4000u);
  EXPECT_NEAR(m.rmseGap, 1e-3, 1e-15);
  EXPECT_DOUBLE_EQ(m.maxAbsGap, 1e-3);
  EXPECT_DOUBLE_EQ(m.maxAbsU, 2.0);
  EXPECT_EQ(m.saturatedSamples, 1000u);
  EXPECT_DOUBLE_EQ(m.meanSqpIterations, 3.0);
  // Solve statistics are sampled once per control period.
  EXPECT_DOUBLE_EQ(m.meanSolveMs, 2.0);
  EXPECT_DOUBLE_EQ(m.maxSolveMs, 3.0);
  EXPECT_NEAR(m.rmsA2, 0.2 / std::sqrt(2.0), 1e-3);
}

}  // namespace
}  // namespace maglev
