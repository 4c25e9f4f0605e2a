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

#include "maglev/analysis.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "maglev/errors.hpp"

namespace maglev {

double rmse(std::span<const double> series, double reference) {
  if (series.empty()) {
    throw std::invalid_argument("rmse: empty series");
  }
  double acc = 0.0;
  for (double v : series) {
    acc += (v - reference) * (v - reference);
  }
  return std::sqrt(acc / static_cast<double>(series.size()));
}

Histogram histogram(std::span<const double> series, int binCount, double lo, double hi) {
  if (binCount < 1 || !(hi > lo)) {
    throw std::invalid_argument("histogram: need binCount >= 1 and hi > lo");
  }
  Histogram h;
  h.counts.assign(static_cast<std::size_t>(binCount), 0);
  h.edges.resize(static_cast<std::size_t>(binCount) + 1);
  const double width = (hi - lo) / binCount;
  for (int b = 0; b <= binCount; ++b) {
    h.edges[b] = b == binCount ? hi : lo + b * width;
  }
  for (double v : series) {
    if (!std::isfinite(v) || v > hi) {
      ++h.overflow;
    } else if (v < lo) {
      ++h.underflow;
    } else {
      const auto b = std::min(static_cast<std::size_t>((v - lo) / width), h.counts.size() - 1);
      ++h.counts[b];
    }
  }
  return h;
}

Spectrum welch_spectrum(std::span<const double> series, double sampleRate, std::size_t segmentLength,
                        double overlapFraction) {
  const std::size_t L = segmentLength;
  if (L < 2 || (L & (L - 1)) != 0) {
    throw std::invalid_argument("welch_spectrum: segment length must be a power of two >= 2");
  }
  if (series.size() < L) {
    throw std::invalid_argument("welch_spectrum: series shorter than one segment");
  }
  if (!(overlapFraction >= 0.0 && overlapFraction < 1.0) || !(sampleRate > 0.0)) {
    throw std::invalid_argument("welch_spectrum: overlap must lie in [0, 1) and sampleRate > 0");
  }
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(L) * (1.0 - overlapFraction))));
  const std::size_t segments = 1 + (series.size() - L) / hop;

  std::vector<double> window(L);
  for (std::size_t i = 0; i < L; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(L)));
  }
  const double sumW = std::accumulate(window.begin(), window.end(), 0.0);
  const double sumW2 = std::inner_product(window.begin(), window.end(), window.begin(), 0.0);

  const std::size_t bins = L / 2 + 1;
  std::vector<double> accum(bins, 0.0);
  std::vector<double> buf(L);
  std::vector<std::complex<double>> spec;
  Eigen::FFT<double> fft;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const auto part = series.subspan(seg * hop, L);
    const double mean = std::accumulate(part.begin(), part.end(), 0.0) / static_cast<double>(L);
    for (std::size_t i = 0; i < L; ++i) {
      buf[i] = (part[i] - mean) * window[i];
    }
    fft.fwd(spec, buf);
    for (std::size_t k = 0; k < bins; ++k) {
      accum[k] += std::norm(spec[k]);
    }
  }

  Spectrum out;
  out.segmentLength = L;
  out.overlap = overlapFraction;
  out.segments = segments;
  out.resolution = sampleRate / static_cast<double>(L);
  out.frequencies.resize(bins);
  out.amplitude.resize(bins);
  out.power.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const double mean = accum[k] / static_cast<double>(segments);
    const bool edge = k == 0 || k == bins - 1;
    out.frequencies[k] = static_cast<double>(k) * out.resolution;
    out.amplitude[k] = std::sqrt(mean) * (edge ? 1.0 : std::numbers::sqrt2) / sumW;
    out.power[k] = (edge ? 1.0 : 2.0) * mean / (static_cast<double>(L) * sumW2);
  }
  return out;
}

double band_rms(const Spectrum& spectrum, double lo, double hi) {
  double acc = 0.0;
  for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k) {
    const double f = spectrum.frequencies[k];
    if (f >= lo && f <= hi) {
      acc += spectrum.power[k];
    }
  }
  return std::sqrt(acc);
}

void AnalysisOptions::validate() const {
  if (segmentLength < 2 || (segmentLength & (segmentLength - 1)) != 0) {
    throw ConfigError("analysis.segment_length must be a power of two >= 2");
  }
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw ConfigError("analysis.overlap must lie in [0, 1)");
  }
  if (!(bandLo >= 0.0 && bandHi > bandLo)) {
    throw ConfigError("analysis band must satisfy 0 <= band_lo < band_hi");
  }
  if (histogramBins < 1 || !(accelerationRange > 0.0) || !(gapRange > 0.0)) {
    throw ConfigError("analysis histogram settings out of range");
  }
}

std::size_t effective_segment_length(std::size_t requested, std::size_t n) {
  const std::size_t cap = std::min(requested, n);
  if (cap < 2) {
    return 0;
  }
  std::size_t L = 1;
  while (L * 2 <= cap) {
    L *= 2;
  }
  return L;
}

Spectrum acceleration_spectrum(const RideLog& log, const AnalysisOptions& options) {
  const std::size_t L = effective_segment_length(options.segmentLength, log.a2.size());
  if (L == 0) {
    throw std::invalid_argument("ride log too short for a spectrum");
  }
  return welch_spectrum(log.a2, 1.0 / log.plantStep, L, options.overlap);
}

ComfortMetrics comfort_metrics(const RideLog& log, double bandLo, double bandHi,
                               const AnalysisOptions& options) {
  const Spectrum sp = acceleration_spectrum(log, options);
  const double nyquist = sp.frequencies.back();
  if (!(bandLo >= 0.0 && bandHi > bandLo && bandHi <= nyquist)) {
    throw std::invalid_argument("comfort_metrics: band must lie within [0, Nyquist]");
  }
  ComfortMetrics m;
  m.bandRms = band_rms(sp, bandLo, bandHi);
  m.peakFrequency = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < sp.frequencies.size(); ++k) {
    const double f = sp.frequencies[k];
    if (f >= bandLo && f <= bandHi && sp.amplitude[k] > m.peakAmplitude) {
      m.peakAmplitude = sp.amplitude[k];
      m.peakFrequency = f;
    }
  }
  return m;
}

RunMetrics compute_metrics(const RideLog& log, const AnalysisOptions& options) {
  RunMetrics m;
  m.name = log.name;
  m.ok = log.ok();
  m.samples = log.size();
  m.nonConverged = log.nonConverged;
  if (log.size() == 0) {
    return m;
  }
  m.rmseGap = rmse(log.ds, 0.0);
  m.rmsA2 = rmse(log.a2, 0.0);
  for (std::size_t j = 0; j < log.size(); ++j) {
    m.maxAbsGap = std::max(m.maxAbsGap, std::abs(log.ds[j]));
    m.maxAbsA2 = std::max(m.maxAbsA2, std::abs(log.a2[j]));
  }
  for (double u : log.u) {
    m.maxAbsU = std::max(m.maxAbsU, std::abs(u));
    if (std::abs(u) >= log.uMax) {
      ++m.saturatedSamples;
    }
  }
  // Solve statistics once per control step.
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(log.sampleTime / log.plantStep)));
  double iters = 0.0;
  double ms = 0.0;
  std::size_t steps = 0;
  for (std::size_t j = 0; j < log.solveMs.size(); j += stride) {
    iters += log.sqpIterations[j];
    ms += log.solveMs[j];
    m.maxSolveMs = std::max(m.maxSolveMs, log.solveMs[j]);
    ++steps;
  }
  if (steps > 0) {
    m.meanSqpIterations = iters / static_cast<double>(steps);
    m.meanSolveMs = ms / static_cast<double>(steps);
  }
  const std::size_t L = effective_segment_length(options.segmentLength, log.size());
  if (L > 0) {
    const double nyquist = 0.5 / log.plantStep;
    m.comfort = comfort_metrics(log, std::min(options.bandLo, nyquist), std::min(options.bandHi, nyquist),
                                options);
  }
  return m;
}

}  // namespace maglev
