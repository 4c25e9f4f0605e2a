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

#include "maglev_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "maglev/csv.hpp"
#include "maglev/errors.hpp"
#include "maglev/magnet_table.hpp"

namespace maglev::app {
namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& v) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") {
    return true;
  }
  if (v == "false" || v == "no" || v == "off" || v == "0") {
    return false;
  }
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    out += (out.empty() ? "" : ",") + s;
  }
  return out;
}

std::string join(const std::vector<double>& items) {
  std::string out;
  for (double v : items) {
    out += (out.empty() ? "" : ",") + format_double(v);
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& v) {
  const fs::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

struct Key {
  const char* section;
  const char* name;
  const char* help;
  std::function<std::string(const AppConfig&)> get;
  std::function<void(AppConfig&, const std::string&, const fs::path&)> set;
};

#define MAGLEV_NUM_KEY(sec, key, help, field)                                             \
  Key {                                                                                    \
    sec, key, help, [](const AppConfig& c) { return format_double(c.field); },             \
        [](AppConfig& c, const std::string& v, const fs::path&) { c.field = to_double(v); } \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table{
      MAGLEV_NUM_KEY("plant", "m1", "magnet plus chassis mass [kg]", params.mech.m1),
      MAGLEV_NUM_KEY("plant", "m2", "car-body mass [kg]", params.mech.m2),
      MAGLEV_NUM_KEY("plant", "ck", "suspension stiffness [N/m]", params.mech.ck),
      MAGLEV_NUM_KEY("plant", "cd", "suspension damping [N s/m]", params.mech.cd),
      MAGLEV_NUM_KEY("plant", "g", "gravitational acceleration [m/s^2]", params.mech.g),
      MAGLEV_NUM_KEY("plant", "f_load", "static load of the single-mass model [N]", params.mech.fL),
      MAGLEV_NUM_KEY("plant", "mismatch_m1", "plant/model factor on m1", mismatch.m1),
      MAGLEV_NUM_KEY("plant", "mismatch_m2", "plant/model factor on m2", mismatch.m2),
      MAGLEV_NUM_KEY("plant", "mismatch_ck", "plant/model factor on ck", mismatch.ck),
      MAGLEV_NUM_KEY("plant", "mismatch_cd", "plant/model factor on cd", mismatch.cd),
      MAGLEV_NUM_KEY("plant", "mismatch_km", "plant/model factor on km", mismatch.km),
      MAGLEV_NUM_KEY("magnet", "km", "force constant, F = km (I/s)^2 [N m^2/A^2]", params.magnet.km),
      MAGLEV_NUM_KEY("magnet", "rc", "coil resistance [Ohm]", params.magnet.rc),
      MAGLEV_NUM_KEY("magnet", "s_nom", "nominal air gap [m]", params.magnet.sNom),
      MAGLEV_NUM_KEY("magnet", "u_max", "bound on the voltage deviation [V]", params.magnet.uMax),
      Key{"magnet", "backend", "analytic | table",
          [](const AppConfig& c) {
            return std::string(c.params.magnet.backend == MagnetBackend::table ? "table" : "analytic");
          },
          [](AppConfig& c, const std::string& v, const fs::path&) {
            if (v == "analytic") {
              c.params.magnet.backend = MagnetBackend::analytic;
            } else if (v == "table") {
              c.params.magnet.backend = MagnetBackend::table;
            } else {
              throw ConfigError("magnet.backend must be analytic or table");
            }
          }},
      Key{"magnet", "table", "magnet table file (see docs/magnet_table.md)",
          [](const AppConfig& c) { return c.magnetTable.string(); },
          [](AppConfig& c, const std::string& v, const fs::path& base) { c.magnetTable = resolve(base, v); }},
      MAGLEV_NUM_KEY("guideway", "girder_length", "girder span [m]", guideway.girderLength),
      MAGLEV_NUM_KEY("guideway", "sag_amplitude", "midspan deflection [m]", guideway.sagAmplitude),
      Key{"guideway", "stochastic", "enable stochastic irregularity",
          [](const AppConfig& c) { return std::string(c.guideway.enableStochastic ? "true" : "false"); },
          [](AppConfig& c, const std::string& v, const fs::path&) { c.guideway.enableStochastic = to_bool(v); }},
      MAGLEV_NUM_KEY("guideway", "irregularity_rms", "irregularity RMS [m]", guideway.irregularity.rms),
      MAGLEV_NUM_KEY("guideway", "irregularity_cutoff", "low-pass cutoff wavelength [m]",
                     guideway.irregularity.cutoffWavelength),
      MAGLEV_NUM_KEY("guideway", "irregularity_spacing", "irregularity sample spacing [m]",
                     guideway.irregularity.spacing),
      Key{"guideway", "irregularity_file", "two-column profile replacing the generated irregularity",
          [](const AppConfig& c) { return c.irregularityFile.string(); },
          [](AppConfig& c, const std::string& v, const fs::path& base) { c.irregularityFile = resolve(base, v); }},
      MAGLEV_NUM_KEY("scenario", "speed_kmh", "vehicle speed [km/h]", speedKmh),
      MAGLEV_NUM_KEY("scenario", "duration", "simulated time [s]", duration),
      MAGLEV_NUM_KEY("scenario", "plant_step", "plant RK4 step, divides the sampling time [s]", plantStep),
      Key{"scenario", "seed", "guideway irregularity seed",
          [](const AppConfig& c) { return std::to_string(c.seed); },
          [](AppConfig& c, const std::string& v, const fs::path&) {
            const long long s = to_int(v);
            if (s < 0) {
              throw ConfigError("scenario.seed must be >= 0");
            }
            c.seed = static_cast<std::uint64_t>(s);
          }},
      Key{"scenario", "controller", "controller used by simulate",
          [](const AppConfig& c) { return c.simulateController; },
          [](AppConfig& c, const std::string& v, const fs::path&) { c.simulateController = v; }},
      Key{"scenario", "controllers", "controllers used by compare",
          [](const AppConfig& c) { return join(c.compareControllers); },
          [](AppConfig& c, const std::string& v, const fs::path&) { c.compareControllers = split_list(v); }},
      Key{"analysis", "segment_length", "Welch segment length (power of two)",
          [](const AppConfig& c) { return std::to_string(c.analysis.segmentLength); },
          [](AppConfig& c, const std::string& v, const fs::path&) {
            const long long n = to_int(v);
            if (n < 2) {
              throw ConfigError("analysis.segment_length must be >= 2");
            }
            c.analysis.segmentLength = static_cast<std::size_t>(n);
          }},
      MAGLEV_NUM_KEY("analysis", "overlap", "Welch segment overlap fraction", analysis.overlap),
      MAGLEV_NUM_KEY("analysis", "band_lo", "comfort band lower edge [Hz]", analysis.bandLo),
      MAGLEV_NUM_KEY("analysis", "band_hi", "comfort band upper edge [Hz]", analysis.bandHi),
      Key{"analysis", "histogram_bins", "histogram bin count",
          [](const AppConfig& c) { return std::to_string(c.analysis.histogramBins); },
          [](AppConfig& c, const std::string& v, const fs::path&) {
            c.analysis.histogramBins = static_cast<int>(to_int(v));
          }},
      MAGLEV_NUM_KEY("analysis", "acceleration_range", "car-body acceleration histogram half-range [m/s^2]",
                     analysis.accelerationRange),
      MAGLEV_NUM_KEY("analysis", "gap_range", "air-gap error histogram half-range [m]", analysis.gapRange),
      MAGLEV_NUM_KEY("analysis", "spectrum_max_hz", "highest frequency written to spectra [Hz]", spectrumMaxHz),
  };
  return table;
}

#undef MAGLEV_NUM_KEY

struct ControllerKey {
  const char* name;
  const char* help;
  std::function<std::string(const ControllerConfig&)> get;
  std::function<void(ControllerConfig&, const std::string&)> set;
};

const std::vector<ControllerKey>& controller_keys() {
  static const std::vector<ControllerKey> table{
      {"model", "single_mass | two_mass",
       [](const ControllerConfig& c) {
         return std::string(c.model == ModelKind::twoMass ? "two_mass" : "single_mass");
       },
       [](ControllerConfig& c, const std::string& v) {
         if (v == "two_mass") {
           c.model = ModelKind::twoMass;
         } else if (v == "single_mass") {
           c.model = ModelKind::singleMass;
         } else {
           throw ConfigError("model must be single_mass or two_mass");
         }
       }},
      {"horizon", "prediction horizon T [s]", [](const ControllerConfig& c) { return format_double(c.horizon); },
       [](ControllerConfig& c, const std::string& v) { c.horizon = to_double(v); }},
      {"n_intervals", "shooting intervals N",
       [](const ControllerConfig& c) { return std::to_string(c.nIntervals); },
       [](ControllerConfig& c, const std::string& v) { c.nIntervals = static_cast<int>(to_int(v)); }},
      {"sampling_time", "controller period [s]",
       [](const ControllerConfig& c) { return format_double(c.samplingTime); },
       [](ControllerConfig& c, const std::string& v) { c.samplingTime = to_double(v); }},
      {"q", "output weights: s, dz2, a1, a2, I (two-mass) or s, a1, I (single mass)",
       [](const ControllerConfig& c) { return join(c.qWeights); },
       [](ControllerConfig& c, const std::string& v) {
         c.qWeights.clear();
         for (const auto& item : split_list(v)) {
           c.qWeights.push_back(to_double(item));
         }
       }},
      {"r", "input weight", [](const ControllerConfig& c) { return format_double(c.rWeight); },
       [](ControllerConfig& c, const std::string& v) { c.rWeight = to_double(v); }},
      {"mode", "converge | rti",
       [](const ControllerConfig& c) {
         return std::string(c.mode == IterationMode::converge ? "converge" : "rti");
       },
       [](ControllerConfig& c, const std::string& v) {
         if (v == "converge") {
           c.mode = IterationMode::converge;
         } else if (v == "rti") {
           c.mode = IterationMode::realTimeIteration;
         } else {
           throw ConfigError("mode must be converge or rti");
         }
       }},
      {"prediction", "nonlinear | linearized",
       [](const ControllerConfig& c) {
         return std::string(c.prediction == PredictionModel::nonlinear ? "nonlinear" : "linearized");
       },
       [](ControllerConfig& c, const std::string& v) {
         if (v == "nonlinear") {
           c.prediction = PredictionModel::nonlinear;
         } else if (v == "linearized") {
           c.prediction = PredictionModel::linearized;
         } else {
           throw ConfigError("prediction must be nonlinear or linearized");
         }
       }},
      {"max_iterations", "SQP iteration limit",
       [](const ControllerConfig& c) { return std::to_string(c.maxIterations); },
       [](ControllerConfig& c, const std::string& v) { c.maxIterations = static_cast<int>(to_int(v)); }},
      {"kkt_tol", "KKT residual tolerance",
       [](const ControllerConfig& c) { return format_double(c.kktTolerance); },
       [](ControllerConfig& c, const std::string& v) { c.kktTolerance = to_double(v); }},
      {"defect_tol", "continuity defect tolerance",
       [](const ControllerConfig& c) { return format_double(c.defectTolerance); },
       [](ControllerConfig& c, const std::string& v) { c.defectTolerance = to_double(v); }},
  };
  return table;
}

bool is_preset(const std::string& name) {
  const auto& names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ControllerConfig& controller_entry(AppConfig& cfg, const std::string& name) {
  auto it = cfg.controllers.find(name);
  if (it == cfg.controllers.end()) {
    ControllerConfig c = is_preset(name) ? preset_controller(name) : ControllerConfig{};
    c.name = name;
    it = cfg.controllers.emplace(name, std::move(c)).first;
  }
  return it->second;
}

void assign(AppConfig& cfg, const std::string& section, const std::string& key, const std::string& value,
            const fs::path& base) {
  if (section.rfind("controller.", 0) == 0) {
    const std::string name = section.substr(11);
    if (name.empty()) {
      throw ConfigError("controller section needs a name, e.g. [controller.C2M]");
    }
    for (const auto& k : controller_keys()) {
      if (key == k.name) {
        k.set(controller_entry(cfg, name), value);
        return;
      }
    }
    throw ConfigError("unknown key '" + key + "' in [" + section + "]");
  }
  bool knownSection = false;
  for (const auto& k : keys()) {
    if (section == k.section) {
      knownSection = true;
      if (key == k.name) {
        k.set(cfg, value, base);
        return;
      }
    }
  }
  if (!knownSection) {
    throw ConfigError("unknown section [" + section + "]");
  }
  throw ConfigError("unknown key '" + key + "' in [" + section + "]");
}

void finalize(AppConfig& cfg) {
  if (cfg.params.magnet.backend == MagnetBackend::table) {
    if (cfg.magnetTable.empty()) {
      throw ConfigError("magnet.backend = table requires magnet.table");
    }
    cfg.params.magnet.table = std::make_shared<const MagnetTable>(MagnetTable::load(cfg.magnetTable));
  } else {
    cfg.params.magnet.table.reset();
  }
  cfg.params.validate();
  cfg.guideway.validate();
  cfg.analysis.validate();
  if (!(cfg.speedKmh > 0.0) || !(cfg.duration > 0.0) || !(cfg.plantStep > 0.0)) {
    throw ConfigError("scenario speed_kmh, duration and plant_step must be positive");
  }
  if (!(cfg.spectrumMaxHz > 0.0)) {
    throw ConfigError("analysis.spectrum_max_hz must be positive");
  }
  for (auto& [name, c] : cfg.controllers) {
    c.validate();
  }
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::string body = trim(text);
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

ControllerConfig AppConfig::controller(const std::string& name) const {
  if (const auto it = controllers.find(name); it != controllers.end()) {
    return it->second;
  }
  if (is_preset(name)) {
    return preset_controller(name);
  }
  std::string valid;
  for (const auto& n : controller_names()) {
    valid += (valid.empty() ? "" : ", ") + n;
  }
  throw ConfigError("unknown controller '" + name + "' (valid: " + valid + ")");
}

std::vector<std::string> AppConfig::controller_names() const {
  std::vector<std::string> names = preset_names();
  for (const auto& [name, c] : controllers) {
    if (!is_preset(name)) {
      names.push_back(name);
    }
  }
  return names;
}

AppConfig parse_config(std::string_view text, const fs::path& baseDir) {
  AppConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto cut = line.find_first_of("#;");
    const std::string body = trim(std::string_view(line).substr(0, cut));
    if (body.empty()) {
      continue;
    }
    try {
      if (body.front() == '[') {
        if (body.back() != ']') {
          throw ConfigError("malformed section header '" + body + "'");
        }
        section = trim(std::string_view(body).substr(1, body.size() - 2));
        if (section.rfind("controller.", 0) == 0) {
          controller_entry(cfg, section.substr(11));
        }
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected 'key = value'");
      }
      if (section.empty()) {
        throw ConfigError("key outside of a section");
      }
      assign(cfg, section, trim(std::string_view(body).substr(0, eq)),
             trim(std::string_view(body).substr(eq + 1)), baseDir);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineNo) + ": " + e.what());
    }
  }
  finalize(cfg);
  return cfg;
}

AppConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(AppConfig& cfg, std::string_view assignment, const fs::path& baseDir) {
  const auto eq = assignment.find('=');
  const std::string lhs = trim(assignment.substr(0, eq));
  const auto dot = lhs.rfind('.');
  if (eq == std::string_view::npos || dot == std::string::npos) {
    throw ConfigError("override must look like section.key=value, got '" + std::string(assignment) + "'");
  }
  assign(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), trim(assignment.substr(eq + 1)), baseDir);
  finalize(cfg);
}

std::string defaults_table() {
  const AppConfig def;
  std::ostringstream out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      section = k.section;
      out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(def) << "    # " << k.help << '\n';
  }
  for (const auto& name : preset_names()) {
    const ControllerConfig c = preset_controller(name);
    out << "\n[controller." << name << "]\n";
    for (const auto& k : controller_keys()) {
      out << k.name << " = " << k.get(c) << "    # " << k.help << '\n';
    }
  }
  return out.str();
}

Scenario make_scenario(const AppConfig& cfg, const std::string& controllerName) {
  Scenario sc;
  sc.name = controllerName;
  sc.params = cfg.params;
  sc.mismatch = cfg.mismatch;
  sc.speed = cfg.speedKmh / 3.6;
  sc.duration = cfg.duration;
  sc.plantStep = cfg.plantStep;
  sc.controller = cfg.controller(controllerName);
  sc.guideway = make_guideway(cfg.guideway, cfg.seed, sc.speed * sc.duration + cfg.guideway.girderLength);
  if (cfg.guideway.enableStochastic && !cfg.irregularityFile.empty()) {
    sc.guideway.irregularity = load_irregularity(cfg.irregularityFile);
  }
  sc.validate();
  return sc;
}

}  // namespace maglev::app
