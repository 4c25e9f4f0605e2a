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

#include "maglev_app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "maglev/csv.hpp"
#include "maglev/errors.hpp"
#include "maglev/guideway.hpp"
#include "maglev/model.hpp"
#include "maglev/simulation.hpp"
#include "maglev_app/svg.hpp"

namespace maglev::app {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::ok:
      return "ok";
    case RunStatus::levitationFailure:
      return "levitation_failure";
    case RunStatus::error:
      return "error";
  }
  return "error";
}

// NaN is not valid JSON.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const RunMetrics& m) {
  return json{{"controller", m.name},
              {"ok", m.ok},
              {"samples", m.samples},
              {"rmse_ds", number(m.rmseGap)},
              {"max_abs_ds", number(m.maxAbsGap)},
              {"rms_a2", number(m.rmsA2)},
              {"max_abs_a2", number(m.maxAbsA2)},
              {"band_rms_a2", number(m.comfort.bandRms)},
              {"peak_frequency", number(m.comfort.peakFrequency)},
              {"peak_amplitude", number(m.comfort.peakAmplitude)},
              {"max_abs_u", number(m.maxAbsU)},
              {"saturated_samples", m.saturatedSamples},
              {"mean_sqp_iterations", number(m.meanSqpIterations)},
              {"non_converged", m.nonConverged},
              {"mean_solve_ms", number(m.meanSolveMs)},
              {"max_solve_ms", number(m.maxSolveMs)}};
}

void write_rows(const fs::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) {
    os << (c ? "," : "") << header[c];
  }
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "") << row[c];
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::vector<double> scaled(const std::vector<double>& v, double k) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [k](double x) { return x * k; });
  return out;
}

Spectrum truncated(Spectrum sp, double maxHz) {
  std::size_t n = 0;
  while (n < sp.frequencies.size() && sp.frequencies[n] <= maxHz) {
    ++n;
  }
  sp.frequencies.resize(n);
  sp.amplitude.resize(n);
  sp.power.resize(n);
  return sp;
}

bool has_spectrum(const RideLog& log, const AnalysisOptions& opts) {
  return effective_segment_length(opts.segmentLength, log.size()) > 0;
}

std::string spectrum_svg(const std::vector<std::pair<std::string, Spectrum>>& spectra,
                         const std::string& title) {
  std::vector<Series> series;
  for (const auto& [name, sp] : spectra) {
    // Skip DC so the log axis stays finite.
    Series s{name, {}, {}};
    for (std::size_t k = 1; k < sp.frequencies.size(); ++k) {
      s.x.push_back(sp.frequencies[k]);
      s.y.push_back(sp.amplitude[k]);
    }
    series.push_back(std::move(s));
  }
  ChartOptions opts;
  opts.title = title;
  opts.xLabel = "frequency [Hz]";
  opts.yLabel = "amplitude of z2 acceleration [m/s^2]";
  opts.logY = true;
  return line_chart(series, opts);
}

struct HistogramSet {
  std::vector<double> edges;
  std::vector<BarGroup> groups;
};

HistogramSet histograms(const std::vector<const RideLog*>& logs, bool gap, const AnalysisOptions& opts) {
  HistogramSet set;
  const double r = gap ? opts.gapRange : opts.accelerationRange;
  for (const RideLog* log : logs) {
    const Histogram h = histogram(gap ? log->ds : log->a2, opts.histogramBins, -r, r);
    set.edges = h.edges;
    BarGroup g{log->name, {}};
    const double total = static_cast<double>(std::max<std::size_t>(log->size(), 1));
    for (std::size_t c : h.counts) {
      g.values.push_back(static_cast<double>(c) / total);
    }
    set.groups.push_back(std::move(g));
  }
  if (set.edges.empty()) {
    set.edges = histogram({}, opts.histogramBins, -r, r).edges;
  }
  return set;
}

void write_histogram_csv(const fs::path& path, const std::vector<const RideLog*>& logs, bool gap,
                         const AnalysisOptions& opts) {
  const double r = gap ? opts.gapRange : opts.accelerationRange;
  std::vector<std::string> header{"lo", "hi"};
  std::vector<Histogram> hs;
  for (const RideLog* log : logs) {
    header.push_back(log->name);
    hs.push_back(histogram(gap ? log->ds : log->a2, opts.histogramBins, -r, r));
  }
  const Histogram ref = histogram({}, opts.histogramBins, -r, r);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b + 1 < ref.edges.size(); ++b) {
    std::vector<std::string> row{format_double(ref.edges[b]), format_double(ref.edges[b + 1])};
    for (const auto& h : hs) {
      row.push_back(std::to_string(h.counts[b]));
    }
    rows.push_back(std::move(row));
  }
  // Out-of-range samples as open-ended rows.
  std::vector<std::string> under{"-inf", format_double(-r)};
  std::vector<std::string> over{format_double(r), "inf"};
  for (const auto& h : hs) {
    under.push_back(std::to_string(h.underflow));
    over.push_back(std::to_string(h.overflow));
  }
  rows.insert(rows.begin(), under);
  rows.push_back(over);
  write_rows(path, header, rows);
}

std::string histogram_svg(const std::vector<const RideLog*>& logs, bool gap, const AnalysisOptions& opts) {
  HistogramSet set = histograms(logs, gap, opts);
  ChartOptions co;
  if (gap) {
    set.edges = scaled(set.edges, 1e3);
    co.title = "Air gap deviation histogram";
    co.xLabel = "ds [mm]";
  } else {
    co.title = "Car-body acceleration histogram";
    co.xLabel = "z2 acceleration [m/s^2]";
  }
  co.yLabel = "fraction of samples";
  return bar_chart(set.edges, set.groups, co);
}

void print_metrics_table(std::ostream& out, const std::vector<RunMetrics>& ms) {
  out << std::left << std::setw(10) << "controller" << std::right << std::setw(20) << "status"
      << std::setw(14) << "rmse_ds[m]" << std::setw(14) << "max|a2|" << std::setw(14) << "band_rms_a2"
      << std::setw(12) << "iters" << std::setw(14) << "solve_ms" << '\n';
  out << std::setprecision(4);
  for (const auto& m : ms) {
    out << std::left << std::setw(10) << m.name << std::right << std::setw(20)
        << (m.ok ? "ok" : "failed") << std::setw(14) << m.rmseGap << std::setw(14) << m.maxAbsA2
        << std::setw(14) << m.comfort.bandRms << std::setw(12) << m.meanSqpIterations << std::setw(14)
        << m.meanSolveMs << '\n';
  }
}

std::string summary_line(const RunMetrics& m, const RideLog& log) {
  std::ostringstream os;
  os << std::setprecision(6) << m.name << ": status=" << status_name(log.status) << " samples=" << m.samples
     << " rmse_ds=" << m.rmseGap << " max_abs_a2=" << m.maxAbsA2 << " band_rms_a2=" << m.comfort.bandRms
     << " mean_solve_ms=" << m.meanSolveMs;
  return os.str();
}

unsigned parse_threads(const char* text) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(text, &pos);
    if (pos == std::string(text).size() && v > 0) {
      return static_cast<unsigned>(v);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string("MAGLEV_NMPC_THREADS must be a positive integer, got '") + text + "'");
}

}  // namespace

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols{
      "controller", "ok",          "samples",        "rmse_ds",          "max_abs_ds",
      "rms_a2",     "max_abs_a2",  "band_rms_a2",    "peak_frequency",   "peak_amplitude",
      "max_abs_u",  "saturated_samples", "mean_sqp_iterations", "non_converged"};
  return cols;
}

std::vector<std::string> metrics_row(const RunMetrics& m) {
  return {m.name,
          m.ok ? "1" : "0",
          std::to_string(m.samples),
          format_double(m.rmseGap),
          format_double(m.maxAbsGap),
          format_double(m.rmsA2),
          format_double(m.maxAbsA2),
          format_double(m.comfort.bandRms),
          format_double(m.comfort.peakFrequency),
          format_double(m.comfort.peakAmplitude),
          format_double(m.maxAbsU),
          std::to_string(m.saturatedSamples),
          format_double(m.meanSqpIterations),
          std::to_string(m.nonConverged)};
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MAGLEV_NMPC_THREADS"); env != nullptr && *env != '\0') {
    n = std::min(n, parse_threads(env));
  }
  return n;
}

AppConfig resolve_config(const CliOptions& options) {
  AppConfig cfg;
  fs::path base;
  if (!options.config.empty()) {
    cfg = load_config(options.config);
    base = options.config.parent_path();
  }
  for (const auto& o : options.overrides) {
    apply_override(cfg, o, base);
  }
  if (options.seed) {
    cfg.seed = *options.seed;
  }
  if (!options.controllers.empty()) {
    cfg.compareControllers = options.controllers;
    cfg.simulateController = options.controllers.front();
  }
  return cfg;
}

int cmd_equilibrium(const CliOptions& options, std::ostream& out) {
  const AppConfig cfg = resolve_config(options);
  cfg.params.validate();
  const Equilibrium eq = solve_equilibrium(cfg.params, ModelKind::twoMass);
  const Equilibrium single = solve_equilibrium(cfg.params, ModelKind::singleMass);
  const auto& mp = cfg.params.magnet;
  const auto& mech = cfg.params.mech;
  const double weight = (mech.m1 + mech.m2) * mech.g;
  const double forceResidual = magnet_force(mp.sNom, eq.iNom, mp) - weight;
  const double currentResidual = current_derivative(mp.sNom, 0.0, eq.iNom, eq.uNom, mp);
  const double springResidual = mech.ck * eq.dz2Nom + mech.m2 * mech.g;

  if (options.json) {
    const json j{{"i_nom", eq.iNom},
                 {"u_nom", eq.uNom},
                 {"dz2_nom", eq.dz2Nom},
                 {"force_residual", forceResidual},
                 {"relative_force_residual", forceResidual / weight},
                 {"current_residual", currentResidual},
                 {"spring_residual", springResidual},
                 {"single_mass_i_nom", single.iNom},
                 {"single_mass_u_nom", single.uNom}};
    out << j.dump(2) << '\n';
    return kSuccess;
  }
  out << std::setprecision(12);
  out << "i_nom                   = " << eq.iNom << " A\n"
      << "u_nom                   = " << eq.uNom << " V\n"
      << "dz2_nom                 = " << eq.dz2Nom << " m\n"
      << "force_residual          = " << forceResidual << " N\n"
      << "relative_force_residual = " << forceResidual / weight << '\n'
      << "current_residual        = " << currentResidual << " A/s\n"
      << "spring_residual         = " << springResidual << " N\n"
      << "single_mass_i_nom       = " << single.iNom << " A\n"
      << "single_mass_u_nom       = " << single.uNom << " V\n";
  return kSuccess;
}

int cmd_simulate(const CliOptions& options, std::ostream& out) {
  const AppConfig cfg = resolve_config(options);
  const Scenario sc = make_scenario(cfg, cfg.simulateController);
  ensure_dir(options.out);

  const auto t0 = std::chrono::steady_clock::now();
  const RideLog log = run_closed_loop(sc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Partial logs are kept on failure.
  write_ride_log(log, options.out / "ride_log.csv");
  const RunMetrics m = compute_metrics(log, cfg.analysis);
  write_rows(options.out / "metrics.csv", metrics_columns(), {metrics_row(m)});

  ChartOptions gapOpts;
  gapOpts.title = "Air gap deviation, " + log.name;
  gapOpts.xLabel = "time [s]";
  gapOpts.yLabel = "ds [mm]";
  write_text_file(options.out / "air_gap.svg", line_chart({{log.name, log.t, scaled(log.ds, 1e3)}}, gapOpts));
  if (has_spectrum(log, cfg.analysis)) {
    const Spectrum sp = truncated(acceleration_spectrum(log, cfg.analysis), cfg.spectrumMaxHz);
    write_text_file(options.out / "spectrum.svg",
                    spectrum_svg({{log.name, sp}}, "Car-body acceleration spectrum"));
  }
  write_text_file(options.out / "histogram.svg", histogram_svg({&log}, false, cfg.analysis));

  if (options.json) {
    json j = metrics_json(m);
    j["status"] = status_name(log.status);
    j["message"] = log.message;
    j["wall_time_s"] = wall;
    out << j.dump(2) << '\n';
  } else {
    out << summary_line(m, log) << '\n';
    if (!log.ok()) {
      out << "failure: " << log.message << '\n';
    }
  }
  return log.ok() ? kSuccess : kRuntimeError;
}

int cmd_compare(const CliOptions& options, std::ostream& out) {
  const AppConfig cfg = resolve_config(options);
  if (cfg.compareControllers.empty()) {
    throw ConfigError("no controllers to compare");
  }
  // All scenarios are built before any run so that name errors surface first.
  std::vector<Scenario> scenarios;
  for (const auto& name : cfg.compareControllers) {
    scenarios.push_back(make_scenario(cfg, name));
  }
  ensure_dir(options.out);

  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(scenarios.size()));
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<RideLog> logs = run_comparison(scenarios, workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<RunMetrics> metrics;
  std::vector<std::vector<std::string>> rows;
  std::vector<const RideLog*> ptrs;
  for (const auto& log : logs) {
    metrics.push_back(compute_metrics(log, cfg.analysis));
    rows.push_back(metrics_row(metrics.back()));
    ptrs.push_back(&log);
  }
  write_rows(options.out / "metrics.csv", metrics_columns(), rows);

  // Ratios against C1M when present, otherwise against the first controller.
  std::size_t base = 0;
  for (std::size_t k = 0; k < logs.size(); ++k) {
    if (logs[k].name == "C1M") {
      base = k;
      break;
    }
  }
  json ratiosJson = json::array();
  if (logs.size() > 1) {
    std::vector<std::vector<std::string>> ratioRows;
    for (std::size_t k = 0; k < logs.size(); ++k) {
      if (k == base) {
        continue;
      }
      const std::string pair = metrics[k].name + "/" + metrics[base].name;
      const double rBand = metrics[k].comfort.bandRms / metrics[base].comfort.bandRms;
      const double rGap = metrics[k].rmseGap / metrics[base].rmseGap;
      ratioRows.push_back({pair, format_double(rBand), format_double(rGap)});
      ratiosJson.push_back({{"pair", pair}, {"band_rms_a2", number(rBand)}, {"rmse_ds", number(rGap)}});
    }
    write_rows(options.out / "ratios.csv", {"pair", "band_rms_a2", "rmse_ds"}, ratioRows);
  }

  // Spectra on a common frequency grid.
  std::vector<std::pair<std::string, Spectrum>> spectra;
  std::size_t minLen = SIZE_MAX;
  for (const auto& log : logs) {
    minLen = std::min(minLen, log.size());
  }
  if (effective_segment_length(cfg.analysis.segmentLength, minLen) > 0) {
    AnalysisOptions common = cfg.analysis;
    common.segmentLength = effective_segment_length(cfg.analysis.segmentLength, minLen);
    for (const auto& log : logs) {
      spectra.emplace_back(log.name, truncated(acceleration_spectrum(log, common), cfg.spectrumMaxHz));
    }
    std::vector<std::string> header{"frequency"};
    for (const auto& [name, sp] : spectra) {
      header.push_back(name);
    }
    std::vector<std::vector<std::string>> specRows;
    for (std::size_t k = 0; k < spectra.front().second.frequencies.size(); ++k) {
      std::vector<std::string> row{format_double(spectra.front().second.frequencies[k])};
      for (const auto& [name, sp] : spectra) {
        row.push_back(format_double(sp.amplitude[k]));
      }
      specRows.push_back(std::move(row));
    }
    write_rows(options.out / "spectra.csv", header, specRows);
    write_text_file(options.out / "spectra.svg", spectrum_svg(spectra, "Car-body acceleration spectra"));
  }
  write_histogram_csv(options.out / "histogram_a2.csv", ptrs, false, cfg.analysis);
  write_histogram_csv(options.out / "histogram_ds.csv", ptrs, true, cfg.analysis);
  write_text_file(options.out / "histograms.svg", histogram_svg(ptrs, false, cfg.analysis));
  write_text_file(options.out / "histograms_gap.svg", histogram_svg(ptrs, true, cfg.analysis));

  json timing{{"workers", workers}, {"wall_time_s", wall}, {"runs", json::array()}};
  for (const auto& m : metrics) {
    timing["runs"].push_back(
        {{"controller", m.name}, {"mean_solve_ms", number(m.meanSolveMs)}, {"max_solve_ms", number(m.maxSolveMs)}});
  }
  write_text_file(options.out / "timing.json", timing.dump(2) + "\n");

  bool allOk = true;
  for (const auto& log : logs) {
    allOk = allOk && log.ok();
  }
  if (options.json) {
    json j{{"runs", json::array()}, {"ratios", ratiosJson}, {"timing", timing}};
    for (std::size_t k = 0; k < logs.size(); ++k) {
      json r = metrics_json(metrics[k]);
      r["status"] = status_name(logs[k].status);
      r["message"] = logs[k].message;
      j["runs"].push_back(std::move(r));
    }
    out << j.dump(2) << '\n';
  } else {
    print_metrics_table(out, metrics);
    for (const auto& r : ratiosJson) {
      out << "ratio " << r["pair"].get<std::string>() << ": band_rms_a2=" << r["band_rms_a2"].dump()
          << " rmse_ds=" << r["rmse_ds"].dump() << '\n';
    }
    for (const auto& log : logs) {
      if (!log.ok()) {
        out << log.name << " failed: " << log.message << '\n';
      }
    }
  }
  return allOk ? kSuccess : kRuntimeError;
}

int cmd_spectrum(const CliOptions& options, std::ostream& out) {
  if (options.log.empty()) {
    throw ConfigError("spectrum needs --log PATH");
  }
  const AppConfig cfg = resolve_config(options);
  RideLog log = read_ride_log(options.log);
  if (log.name.empty()) {
    log.name = options.log.stem().string();
  }
  if (!has_spectrum(log, cfg.analysis)) {
    throw ConfigError("log '" + options.log.string() + "' is too short for a spectrum");
  }
  ensure_dir(options.out);
  const Spectrum sp = acceleration_spectrum(log, cfg.analysis);
  const RunMetrics m = compute_metrics(log, cfg.analysis);
  CsvTable table;
  table.header = {"frequency", "amplitude", "power"};
  table.columns = {sp.frequencies, sp.amplitude, sp.power};
  write_csv_file(options.out / "spectrum.csv", table);
  write_rows(options.out / "metrics.csv", metrics_columns(), {metrics_row(m)});
  write_text_file(options.out / "spectrum.svg",
                  spectrum_svg({{log.name, truncated(sp, cfg.spectrumMaxHz)}}, "Car-body acceleration spectrum"));
  if (options.json) {
    json j = metrics_json(m);
    j["segment_length"] = sp.segmentLength;
    j["segments"] = sp.segments;
    j["resolution"] = sp.resolution;
    out << j.dump(2) << '\n';
  } else {
    out << std::setprecision(6) << log.name << ": samples=" << m.samples << " segment_length=" << sp.segmentLength
        << " segments=" << sp.segments << " resolution=" << sp.resolution << " Hz band_rms_a2=" << m.comfort.bandRms
        << " peak=" << m.comfort.peakAmplitude << " @ " << m.comfort.peakFrequency << " Hz rmse_ds=" << m.rmseGap
        << '\n';
  }
  return kSuccess;
}

int run_verb(const std::string& verb, const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (verb == "equilibrium") {
      return cmd_equilibrium(options, out);
    }
    if (verb == "simulate") {
      return cmd_simulate(options, out);
    }
    if (verb == "compare") {
      return cmd_compare(options, out);
    }
    if (verb == "spectrum") {
      return cmd_spectrum(options, out);
    }
    err << "error: unknown verb '" << verb << "'\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InfeasibleParameters& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace maglev::app
