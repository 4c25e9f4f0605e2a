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

// Guideway deflection seen by one levitation magnet: a half-sine sag per
// simply supported girder plus an optional seeded stochastic irregularity.

#include <cstdint>
#include <filesystem>
#include <vector>

namespace maglev {

struct IrregularityParams {
  double rms = 0.5e-3;            // target RMS amplitude [m]
  double cutoffWavelength = 10.0; // first-order spatial low-pass [m]
  double spacing = 0.25;          // sample spacing [m]
};

/// Uniformly sampled irregularity, wrapping periodically past its end.
struct IrregularityProfile {
  double spacing = 0.25;
  std::vector<double> samples;

  [[nodiscard]] double length() const { return spacing * static_cast<double>(samples.size()); }
};

struct GuidewayParams {
  double girderLength = 31.0;   // [m]
  double sagAmplitude = 2.0e-3; // midspan deflection [m]
  bool enableStochastic = true;
  IrregularityParams irregularity;

  void validate() const;
};

struct GuidewayProfile {
  double girderLength = 31.0;
  double sagAmplitude = 2.0e-3;
  IrregularityProfile irregularity;  // empty when stochastic content is disabled
  std::uint64_t seed = 0;
  bool enableStochastic = false;
};

/// Gaussian white noise through a first-order spatial low-pass, mean removed
/// and scaled to exactly the requested RMS.
IrregularityProfile generate_irregularity(std::uint64_t seed, double length, double spacing,
                                          const IrregularityParams& psd);

/// Builds a profile covering at least `length` metres of track.
GuidewayProfile make_guideway(const GuidewayParams& params, std::uint64_t seed, double length);

double deflection_at(const GuidewayProfile& profile, double position);

/// d(d_gw)/d(position); multiply by the speed for the time derivative.
double deflection_slope_at(const GuidewayProfile& profile, double position);

double excitation_frequency(const GuidewayProfile& profile, double speed);

/// Two-column text (position [m], deflection [m]) of the irregularity samples.
void save_irregularity(const IrregularityProfile& profile, const std::filesystem::path& path);
IrregularityProfile load_irregularity(const std::filesystem::path& path);

}  // namespace maglev
