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

#pragma once

// Ride-comfort and tracking metrics computed from ride logs.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "maglev/simulation.hpp"

namespace maglev {

double rmse(std::span<const double> series, double reference);

struct Histogram {
  std::vector<double> edges;  // binCount + 1
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;  // includes non-finite samples
};

Histogram histogram(std::span<const double> series, int binCount, double lo, double hi);

/// One-sided Welch estimate. `amplitude` uses the RMS convention (a sine of
/// amplitude A peaks at A / sqrt(2)); `power` is the variance carried by each
/// bin, so its sum approximates the series variance.
struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> amplitude;
  std::vector<double> power;
  double resolution = 0.0;
  std::size_t segmentLength = 0;
  double overlap = 0.0;
  std::size_t segments = 0;
  std::string window = "hann";
};

Spectrum welch_spectrum(std::span<const double> series, double sampleRate, std::size_t segmentLength,
                        double overlapFraction);

/// Square root of the power summed over bins with lo <= f <= hi.
double band_rms(const Spectrum& spectrum, double lo, double hi);

struct AnalysisOptions {
  std::size_t segmentLength = 65536;
  double overlap = 0.5;
  double bandLo = 0.5;  // [Hz]
  double bandHi = 5.0;  // [Hz]
  int histogramBins = 60;
  double accelerationRange = 1.5;  // histogram of a2 over [-r, r] [m/s^2]
  double gapRange = 3e-3;          // histogram of ds over [-r, r] [m]

  void validate() const;
};

struct ComfortMetrics {
  double bandRms = 0.0;
  double peakFrequency = 0.0;  // NaN when the band carries no energy
  double peakAmplitude = 0.0;
};

/// Largest power of two not exceeding min(requested, n); 0 when n < 2.
std::size_t effective_segment_length(std::size_t requested, std::size_t n);

Spectrum acceleration_spectrum(const RideLog& log, const AnalysisOptions& options);

ComfortMetrics comfort_metrics(const RideLog& log, double bandLo, double bandHi,
                               const AnalysisOptions& options = {});

struct RunMetrics {
  std::string name;
  bool ok = true;
  std::size_t samples = 0;
  double rmseGap = 0.0;       // RMSE of ds [m]
  double maxAbsGap = 0.0;     // [m]
  double rmsA2 = 0.0;         // [m/s^2]
  double maxAbsA2 = 0.0;      // [m/s^2]
  ComfortMetrics comfort;
  double maxAbsU = 0.0;       // [V]
  std::size_t saturatedSamples = 0;
  double meanSqpIterations = 0.0;
  std::size_t nonConverged = 0;
  double meanSolveMs = 0.0;   // wall time, not deterministic
  double maxSolveMs = 0.0;
};

RunMetrics compute_metrics(const RideLog& log, const AnalysisOptions& options = {});

}  // namespace maglev
