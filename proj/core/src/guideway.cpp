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

#include "maglev/guideway.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "maglev/errors.hpp"

namespace maglev {
namespace {

double span_phase(double girderLength, double position) {
  return std::fmod(position, girderLength) / girderLength;
}

// Linear interpolation of the periodically extended samples.
struct Lookup {
  std::size_t k0;
  std::size_t k1;
  double t;
};

Lookup lookup(const IrregularityProfile& p, double position) {
  const std::size_t n = p.samples.size();
  const double x = std::fmod(position, p.length()) / p.spacing;
  const double fl = std::floor(x);
  const auto k0 = static_cast<std::size_t>(fl) % n;
  return {k0, (k0 + 1) % n, x - fl};
}

}  // namespace

void GuidewayParams::validate() const {
  if (!(girderLength > 0.0)) {
    throw ConfigError("guideway.girder_length must be > 0");
  }
  if (!(sagAmplitude >= 0.0)) {
    throw ConfigError("guideway.sag_amplitude must be >= 0");
  }
  if (!(irregularity.spacing > 0.0)) {
    throw ConfigError("guideway.irregularity_spacing must be > 0");
  }
  if (!(irregularity.cutoffWavelength > 0.0)) {
    throw ConfigError("guideway.irregularity_cutoff must be > 0");
  }
  if (!(irregularity.rms >= 0.0)) {
    throw ConfigError("guideway.irregularity_rms must be >= 0");
  }
}

IrregularityProfile generate_irregularity(std::uint64_t seed, double length, double spacing,
                                          const IrregularityParams& psd) {
  if (!(length > 0.0) || !(spacing > 0.0)) {
    throw DomainError("generate_irregularity: length and spacing must be positive");
  }
  const auto n = static_cast<std::size_t>(std::ceil(length / spacing)) + 1;
  IrregularityProfile out{spacing, std::vector<double>(n, 0.0)};
  if (psd.rms == 0.0) {
    return out;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> white(0.0, 1.0);
  const double a = std::exp(-2.0 * std::numbers::pi * spacing / psd.cutoffWavelength);
  // Burn-in so the first retained sample is drawn from the stationary process.
  const auto burn = static_cast<std::size_t>(std::ceil(10.0 / (1.0 - a)));
  double y = 0.0;
  for (std::size_t k = 0; k < burn; ++k) {
    y = a * y + (1.0 - a) * white(rng);
  }
  double mean = 0.0;
  for (auto& v : out.samples) {
    y = a * y + (1.0 - a) * white(rng);
    v = y;
    mean += y;
  }
  mean /= static_cast<double>(n);
  double sq = 0.0;
  for (auto& v : out.samples) {
    v -= mean;
    sq += v * v;
  }
  const double rms = std::sqrt(sq / static_cast<double>(n));
  if (rms > 0.0) {
    for (auto& v : out.samples) {
      v *= psd.rms / rms;
    }
  }
  return out;
}

GuidewayProfile make_guideway(const GuidewayParams& params, std::uint64_t seed, double length) {
  params.validate();
  GuidewayProfile p;
  p.girderLength = params.girderLength;
  p.sagAmplitude = params.sagAmplitude;
  p.seed = seed;
  p.enableStochastic = params.enableStochastic;
  if (params.enableStochastic) {
    p.irregularity = generate_irregularity(seed, std::max(length, params.irregularity.spacing),
                                           params.irregularity.spacing, params.irregularity);
  }
  return p;
}

double deflection_at(const GuidewayProfile& profile, double position) {
  if (!(position >= 0.0)) {
    throw DomainError("deflection_at: position must be >= 0");
  }
  double d = profile.sagAmplitude *
             std::sin(std::numbers::pi * span_phase(profile.girderLength, position));
  if (profile.enableStochastic && !profile.irregularity.samples.empty()) {
    const auto& irr = profile.irregularity;
    const auto [k0, k1, t] = lookup(irr, position);
    d += (1.0 - t) * irr.samples[k0] + t * irr.samples[k1];
  }
  return d;
}

double deflection_slope_at(const GuidewayProfile& profile, double position) {
  if (!(position >= 0.0)) {
    throw DomainError("deflection_slope_at: position must be >= 0");
  }
  double slope = profile.sagAmplitude * std::numbers::pi / profile.girderLength *
                 std::cos(std::numbers::pi * span_phase(profile.girderLength, position));
  if (profile.enableStochastic && !profile.irregularity.samples.empty()) {
    const auto& irr = profile.irregularity;
    const auto [k0, k1, t] = lookup(irr, position);
    slope += (irr.samples[k1] - irr.samples[k0]) / irr.spacing;
  }
  return slope;
}

double excitation_frequency(const GuidewayProfile& profile, double speed) {
  if (!(speed > 0.0)) {
    throw DomainError("excitation_frequency: speed must be > 0");
  }
  return speed / profile.girderLength;
}

void save_irregularity(const IrregularityProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write guideway profile '" + path.string() + "'");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t k = 0; k < profile.samples.size(); ++k) {
    out << static_cast<double>(k) * profile.spacing << ' ' << profile.samples[k] << '\n';
  }
  if (!out) {
    throw IoError("failed writing guideway profile '" + path.string() + "'");
  }
}

IrregularityProfile load_irregularity(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open guideway profile '" + path.string() + "'");
  }
  std::vector<double> pos;
  IrregularityProfile p;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line.substr(0, line.find('#')));
    double x = 0.0;
    double d = 0.0;
    if (row >> x >> d) {
      pos.push_back(x);
      p.samples.push_back(d);
    }
  }
  if (pos.size() < 2) {
    throw ConfigError("guideway profile '" + path.string() + "' needs at least two rows");
  }
  p.spacing = pos[1] - pos[0];
  for (std::size_t k = 1; k < pos.size(); ++k) {
    const double expected = pos[0] + static_cast<double>(k) * p.spacing;
    if (!(p.spacing > 0.0) || std::abs(pos[k] - expected) > 1e-9 * std::max(1.0, expected)) {
      throw ConfigError("guideway profile '" + path.string() + "' must be uniformly spaced");
    }
  }
  return p;
}

}  // namespace maglev
