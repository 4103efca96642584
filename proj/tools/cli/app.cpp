#include "app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>

#include "figure.hpp"
#include "geophase/config.hpp"
#include "geophase/parallel.hpp"
#include "geophase/phase_engine.hpp"
#include "geophase/timefunc.hpp"
#include "geophase/verify.hpp"
#include "output.hpp"

#ifndef GEOPHASE_VERSION
#define GEOPHASE_VERSION "0.0.0"
#endif

namespace geophase::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Shared {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::map<std::string, std::string> overrides;  // --<key> flags
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--config", s.config_path, "key = value config file");
  cmd->add_option("--out", s.out_dir, "output directory (default: $GEOPHASE_OUT or .)");
  cmd->add_option("--seed", s.seed, "random seed");
  cmd->add_option("--jobs", s.jobs, "worker threads")->check(CLI::PositiveNumber);
  for (const auto& key : known_config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&s, key](const std::string& v) { s.overrides[key] = v; }, "override config key " + key);
  }
}

fs::path output_dir(const Shared& s) {
  if (!s.out_dir.empty()) return s.out_dir;
  if (const char* env = std::getenv("GEOPHASE_OUT"); env && *env) return env;
  return ".";
}

ConfigValues gather_config(const Shared& s) {
  ConfigValues base;
  if (!s.config_path.empty()) base = load_config_file(s.config_path);
  for (const auto& [k, v] : s.overrides) {
    try {
      (void)parse_real(v);
    } catch (const ConfigError&) {
      throw ConfigError("--" + k + ": invalid value '" + v + "'");
    }
  }
  return merge_config(std::move(base), s.overrides);
}

ResolvedConfig resolve_and_warn(const ConfigValues& values) {
  auto rc = resolve_config(values);
  for (const auto& w : rc.warnings) std::cerr << "geophase: warning: " << w << '\n';
  return rc;
}

ordered_json manifest_base(const std::vector<std::string>& argv, const std::string& command, std::uint64_t seed) {
  return {{"command", command},
          {"command_line", argv},
          {"version", GEOPHASE_VERSION},
          {"timestamp", utc_timestamp()},
          {"seed", seed}};
}

// --- phases -----------------------------------------------------------------

struct PhasesArgs {
  std::optional<double> t_start;
  std::optional<double> t_end;
  int steps = 101;
  std::optional<int> fock_n;
};

int cmd_phases(const Shared& s, const PhasesArgs& a, const std::vector<std::string>& argv) {
  const auto values = gather_config(s);
  const auto rc = resolve_and_warn(values);
  const auto& p = rc.params;
  const auto& w = rc.wave;
  const double start = a.t_start.value_or(w.t0);
  const double stop = a.t_end.value_or(start + 2.0 * std::numbers::pi / w.omega);
  if (start < w.t0) throw UsageError("--t-start must be >= t0 (" + cell(w.t0) + ")");
  if (a.steps < 2) throw UsageError("--steps must be >= 2");
  if (!(stop >= start)) throw UsageError("--t-end must be >= --t-start");
  if (a.fock_n && *a.fock_n < 0) throw UsageError("--fock-n must be >= 0");

  std::vector<double> times(static_cast<std::size_t>(a.steps));
  for (int i = 0; i < a.steps; ++i) times[i] = start + (stop - start) * i / (a.steps - 1);

  std::vector<PhaseSample> samples;
  if (a.fock_n) {
    samples.resize(times.size());
    parallel_for(times.size(), s.jobs, [&](std::size_t i) { samples[i] = fock_phases(p, w, *a.fock_n, times[i]); });
  } else {
    samples = phase_trajectory(p, w, times, s.jobs);
  }
  const TimeFunction tf(p, w);
  const double d = nonstaticity_measure(p).d;
  CsvTable table({"t", "gamma_G", "gamma_D", "gamma_total", "gamma_NL", "gamma_L", "T", "f", "D"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& x = samples[i];
    table.add_row({cell(times[i]), cell(x.gamma_g), cell(x.gamma_d), cell(x.gamma_total), cell(x.gamma_nl),
                   cell(x.gamma_l), cell(tf.phase_time(times[i])), cell(tf(times[i]).f), cell(d)});
  }
  OutputSet out(output_dir(s));
  out.add("phases.csv", table.str());
  auto manifest = manifest_base(argv, "phases", s.seed);
  manifest["config"] = describe_config(rc);
  out.commit(std::move(manifest));
  return kExitOk;
}

// --- figure -----------------------------------------------------------------

struct FigureArgs {
  std::string preset;
  std::string preset_file;
  std::string presets_dir;
};

int cmd_figure(const Shared& s, const FigureArgs& a, const std::vector<std::string>& argv) {
  nlohmann::json preset;
  if (!a.preset_file.empty()) {
    preset = load_preset_file(a.preset_file);
    if (!a.preset.empty() && preset.value("id", "") != a.preset) {
      throw UsageError("preset file id '" + preset.value("id", "") + "' does not match '" + a.preset + "'");
    }
  } else {
    if (a.preset.empty()) throw UsageError("figure: missing preset identifier");
    const auto dir = preset_directory(a.presets_dir.empty() ? std::nullopt : std::optional<fs::path>(a.presets_dir));
    preset = load_preset(dir, a.preset);
  }
  const auto user = gather_config(s);
  OutputSet out(output_dir(s));
  build_figure(preset, user, s.jobs, out);
  auto manifest = manifest_base(argv, "figure", s.seed);
  manifest["config"] = {{"preset", preset}, {"user", user}};
  out.commit(std::move(manifest));
  return kExitOk;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::vector<std::string> grids;
  std::optional<int> fock_n;
};

struct GridAxis {
  std::string key;
  std::vector<double> values;
};

// key=start:stop:count or key=v1,v2,...
GridAxis parse_grid(const std::string& text) {
  static const std::vector<std::string> allowed{"c1", "c2", "phi", "theta", "A0", "omega"};
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--grid '" + text + "': expected key=start:stop:count");
  GridAxis axis{text.substr(0, eq), {}};
  if (std::find(allowed.begin(), allowed.end(), axis.key) == allowed.end()) {
    throw UsageError("--grid: key '" + axis.key + "' is not one of c1, c2, phi, theta, A0, omega");
  }
  const std::string body = text.substr(eq + 1);
  auto split = [](const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t from = 0;
    for (;;) {
      const auto at = text.find(sep, from);
      parts.push_back(text.substr(from, at - from));
      if (at == std::string::npos) break;
      from = at + 1;
    }
    return parts;
  };
  try {
    if (body.find(':') != std::string::npos) {
      const auto parts = split(body, ':');
      if (parts.size() != 3) throw UsageError("--grid '" + text + "': expected start:stop:count");
      const double start = parse_real(parts[0]);
      const double stop = parse_real(parts[1]);
      const double count = parse_real(parts[2]);
      if (count != std::floor(count) || count < 0 || count > 1e7) {
        throw UsageError("--grid '" + text + "': count must be a non-negative integer");
      }
      const int n = static_cast<int>(count);
      for (int i = 0; i < n; ++i) axis.values.push_back(n == 1 ? start : start + (stop - start) * i / (n - 1));
    } else if (!body.empty()) {
      for (const auto& item : split(body, ',')) axis.values.push_back(parse_real(item));
    }
  } catch (const ConfigError& e) {
    throw UsageError("--grid '" + text + "': " + e.what());
  }
  return axis;
}

int cmd_sweep(const Shared& s, const SweepArgs& a, const std::vector<std::string>& argv) {
  if (a.grids.empty()) throw UsageError("sweep: empty grid (give at least one --grid)");
  std::vector<GridAxis> axes;
  std::size_t total = 1;
  for (const auto& g : a.grids) {
    axes.push_back(parse_grid(g));
    for (std::size_t k = 0; k + 1 < axes.size(); ++k) {
      if (axes[k].key == axes.back().key) throw UsageError("--grid: key '" + axes.back().key + "' given twice");
    }
    total *= axes.back().values.size();
  }
  if (total == 0) throw UsageError("sweep: empty grid");
  if (a.fock_n && *a.fock_n < 0) throw UsageError("--fock-n must be >= 0");
  const auto base = gather_config(s);
  (void)resolve_and_warn(base);  // the base itself must be admissible

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  struct Row {
    bool valid = false;
    double rate = nan, unit_g = nan, d = nan, unit_g_n = nan;
  };
  std::vector<Row> rows(total);
  auto point_of = [&](std::size_t index) {
    std::vector<double> coords(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      coords[k] = axes[k].values[index % axes[k].values.size()];
      index /= axes[k].values.size();
    }
    return coords;
  };
  parallel_for(total, s.jobs, [&](std::size_t i) {
    const auto coords = point_of(i);
    ConfigValues v = base;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (axes[k].key == "A0") v.erase("Q0");
      v[axes[k].key] = cell(coords[k]);
    }
    ResolvedConfig rc;
    try {
      rc = resolve_config(v);
    } catch (const ConfigError&) {
      return;  // invalid grid point
    }
    Row r;
    r.valid = true;
    r.rate = gamma_d_rate(rc.params, rc.wave);
    r.unit_g = gamma_g(rc.params, rc.wave, rc.wave.t0 + 1.0) - rc.wave.gamma_g0;
    r.d = nonstaticity_measure(rc.params).d;
    if (a.fock_n) r.unit_g_n = fock_phases(rc.params, rc.wave, *a.fock_n, rc.wave.t0 + 1.0).gamma_g - rc.wave.gamma_g0;
    rows[i] = r;
  });

  std::vector<std::string> header;
  for (const auto& ax : axes) header.push_back(ax.key);
  header.insert(header.end(), {"valid", "Gamma_D", "gamma_G_unit", "D"});
  if (a.fock_n) header.push_back("gamma_G_n_unit");
  CsvTable table(header);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<std::string> line;
    for (double c : point_of(i)) line.push_back(cell(c));
    const auto& r = rows[i];
    line.insert(line.end(), {r.valid ? "1" : "0", cell(r.rate), cell(r.unit_g), cell(r.d)});
    if (a.fock_n) line.push_back(cell(r.unit_g_n));
    table.add_row(std::move(line));
  }
  OutputSet out(output_dir(s));
  out.add("sweep.csv", table.str());
  auto manifest = manifest_base(argv, "sweep", s.seed);
  manifest["config"] = {{"base", base}, {"grid", a.grids}};
  if (a.fock_n) manifest["config"]["fock_n"] = *a.fock_n;
  out.commit(std::move(manifest));
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string mode;
  int count = 3;
  bool no_grid = false;
};

int cmd_verify(const Shared& s, const VerifyArgs& a, const std::vector<std::string>& argv) {
  std::vector<CheckRecord> records;
  auto manifest = manifest_base(argv, "verify", s.seed);
  if (a.mode == "random") {
    if (a.count < 1) throw UsageError("--count must be >= 1");
    const auto analytic = random_cases(s.seed, a.count, false);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      const auto part = run_verification_suite(analytic[i].params, analytic[i].config,
                                               {s.jobs, false, "case" + std::to_string(i) + "."});
      records.insert(records.end(), part.begin(), part.end());
    }
    if (!a.no_grid) {
      const auto grid = random_cases(s.seed, 1, true);
      const auto part = run_verification_suite(grid[0].params, grid[0].config, {s.jobs, true, "grid0."});
      records.insert(records.end(), part.begin(), part.end());
    }
    manifest["config"] = {{"mode", "random"}, {"seed", s.seed}, {"count", a.count}, {"grid_checks", !a.no_grid}};
  } else if (a.mode.empty() || a.mode == "config") {
    const auto rc = resolve_and_warn(gather_config(s));
    records = run_verification_suite(rc.params, rc.wave, {s.jobs, !a.no_grid, ""});
    manifest["config"] = describe_config(rc);
  } else {
    throw UsageError("verify: unknown mode '" + a.mode + "' (use 'random' or a --config)");
  }

  OutputSet out(output_dir(s));
  out.add("verify_report.json", report_json(records));
  out.commit(std::move(manifest));

  std::size_t failed = 0;
  for (const auto& r : records) {
    if (r.pass) continue;
    ++failed;
    std::cout << "FAIL " << r.name << " metric=" << cell(r.metric) << " tolerance=" << cell(r.tolerance) << '\n';
  }
  std::cout << records.size() - failed << " passed, " << failed << " failed\n";
  return failed ? kExitVerifyFailed : kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Geometric, dynamical and total phases of nonstatic coherent and Fock light waves", "geophase"};
  app.set_version_flag("--version", GEOPHASE_VERSION);
  app.require_subcommand(1);

  Shared shared;
  PhasesArgs phases;
  auto* c_phases = app.add_subcommand("phases", "phase trajectories as CSV");
  add_shared(c_phases, shared);
  c_phases->add_option("--t-start", phases.t_start, "first sample time (default t0)");
  c_phases->add_option("--t-end", phases.t_end, "last sample time (default t-start + 2 pi/omega)");
  c_phases->add_option("--steps", phases.steps, "number of rows (>= 2)");
  c_phases->add_option("--fock-n", phases.fock_n, "emit Fock-state phases for level n");

  FigureArgs figure;
  auto* c_figure = app.add_subcommand("figure", "reproduce a figure preset as CSV + SVG");
  add_shared(c_figure, shared);
  c_figure->add_option("preset", figure.preset, "preset identifier, e.g. fig8");
  c_figure->add_option("--preset-file", figure.preset_file, "load this preset file instead");
  c_figure->add_option("--presets", figure.presets_dir, "directory holding preset files");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "grid scan of Gamma_D, unit-time gamma_G and D");
  add_shared(c_sweep, shared);
  c_sweep->add_option("--grid", sweep.grids, "key=start:stop:count or key=v1,v2 (repeatable)");
  c_sweep->add_option("--fock-n", sweep.fock_n, "also emit the Fock geometric phase for level n");

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "run the verification suite");
  add_shared(c_verify, shared);
  c_verify->add_option("mode", verify.mode, "'random' for seeded random draws");
  c_verify->add_option("--count", verify.count, "number of random analytic cases");
  c_verify->add_flag("--no-grid", verify.no_grid, "skip the wavefunction grid checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_phases->parsed()) return cmd_phases(shared, phases, args);
    if (c_figure->parsed()) return cmd_figure(shared, figure, args);
    if (c_sweep->parsed()) return cmd_sweep(shared, sweep, args);
    if (c_verify->parsed()) return cmd_verify(shared, verify, args);
  } catch (const UsageError& e) {
    std::cerr << "geophase: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "geophase: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "geophase: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "geophase: error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace geophase::cli
