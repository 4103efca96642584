#include "figure.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "geophase/parallel.hpp"
#include "geophase/phase_engine.hpp"
#include "geophase/timefunc.hpp"
#include "geophase/wavefunction.hpp"
#include "svg.hpp"

#ifndef GEOPHASE_PRESET_SOURCE_DIR
#define GEOPHASE_PRESET_SOURCE_DIR ""
#endif

namespace geophase::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class PresetError : public UsageError {
  using UsageError::UsageError;
};

std::string text_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return cell(v.get<double>());
  throw PresetError("preset: expected a number or string, got " + v.dump());
}

double real_of(const json& v) { return parse_real(text_of(v)); }

const json& need(const json& obj, const char* key) {
  if (!obj.contains(key)) throw PresetError(std::string("preset: missing '") + key + "'");
  return obj.at(key);
}

ConfigValues values_of(const json& obj, const char* key) {
  ConfigValues out;
  if (!obj.contains(key)) return out;
  for (const auto& [k, v] : obj.at(key).items()) out[k] = text_of(v);
  return out;
}

// Later layers win; an amplitude or frequency given in one form displaces the other.
void layer(ConfigValues& acc, const ConfigValues& top) {
  for (const auto& [k, v] : top) {
    if (k == "A0") acc.erase("Q0");
    if (k == "Q0") acc.erase("A0");
    if (k == "omega") acc.erase("k");
    if (k == "k") acc.erase("omega");
    acc[k] = v;
  }
}

std::vector<double> axis_values(const json& x) {
  const double start = real_of(need(x, "start"));
  const double stop = real_of(need(x, "stop"));
  const int count = need(x, "count").get<int>();
  if (count < 1) throw PresetError("preset: axis count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[i] = count == 1 ? start : start + (stop - start) * i / (count - 1);
  }
  return out;
}

const std::vector<std::string> kPalette{"#d62728", "#2ca02c", "#8a2be2", "#1f77b4",
                                        "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

struct Curve {
  std::string column;
  std::string label;
  bool fock = false;
  int n = 0;
  std::optional<int> a0_squared;
  std::string quantity;
  ConfigValues set;
  Stroke stroke = Stroke::markers;
  std::string colour;
};

std::vector<Curve> curves_of(const json& panel) {
  std::vector<Curve> out;
  const std::string default_quantity = panel.value("quantity", "");
  int index = 0;
  for (const auto& c : need(panel, "curves")) {
    Curve curve;
    curve.column = need(c, "column").get<std::string>();
    curve.label = c.value("label", curve.column);
    const std::string state = c.value("state", "coherent");
    if (state != "coherent" && state != "fock") throw PresetError("preset: unknown state '" + state + "'");
    curve.fock = state == "fock";
    curve.n = c.value("n", 0);
    if (c.contains("a0_squared")) curve.a0_squared = c.at("a0_squared").get<int>();
    curve.quantity = c.value("quantity", default_quantity);
    curve.set = values_of(c, "set");
    curve.stroke = curve.fock ? Stroke::dashdot : Stroke::markers;
    const std::string style = c.value("style", "");
    if (style == "dashdot") curve.stroke = Stroke::dashdot;
    if (style == "solid") curve.stroke = Stroke::solid;
    if (style == "markers") curve.stroke = Stroke::markers;
    const int slot = curve.a0_squared ? *curve.a0_squared : (curve.fock || c.contains("n") ? curve.n : index);
    curve.colour = c.value("colour", kPalette[static_cast<std::size_t>(slot) % kPalette.size()]);
    out.push_back(std::move(curve));
    ++index;
  }
  if (out.empty()) throw PresetError("preset: panel without curves");
  return out;
}

double evaluate(const Curve& c, int level, const ResolvedConfig& rc, double t) {
  const auto& p = rc.params;
  const auto& w = rc.wave;
  const std::string& q = c.quantity;
  if (q == "D") return nonstaticity_measure(p).d;
  if (c.fock) {
    const auto s = fock_phases(p, w, level, t);
    if (q == "gamma_g") return s.gamma_g;
    if (q == "gamma_d") return s.gamma_d;
    if (q == "gamma_total") return s.gamma_total;
    throw PresetError("preset: quantity '" + q + "' is not defined for Fock curves");
  }
  if (q == "gamma_g") return gamma_g(p, w, t);
  if (q == "gamma_d") return gamma_d(p, w, t);
  if (q == "gamma_total") return gamma_total(p, w, t).gamma_total;
  if (q == "rate_d") return gamma_d_rate(p, w);
  if (q == "expect_I") return expectation_I(p, w);
  if (q == "expect_H") return expectation_H(p, w);
  if (q == "T") return phase_time_T(p, w, t);
  if (q == "f") return eval_f(p, w, t).f;
  throw PresetError("preset: unknown quantity '" + q + "'");
}

std::string axis_label(const std::string& quantity) {
  static const std::map<std::string, std::string> names{
      {"gamma_g", "geometric phase"}, {"gamma_d", "dynamical phase"}, {"gamma_total", "total phase"},
      {"rate_d", "Gamma_D"},          {"expect_I", "expectation value"}, {"expect_H", "expectation value"},
      {"D", "D"},                     {"T", "T(t)"},                  {"f", "f(t)"}};
  const auto it = names.find(quantity);
  return it == names.end() ? quantity : it->second;
}

struct PanelContext {
  const json& preset;
  const json& panel;
  ConfigValues base;  // user, preset base and panel settings layered
  std::string id;
  std::string stem;
  std::string title;
  int jobs;
};

// Settings for one curve at one point, with the axis assignment on top.
ConfigValues settings_for(const PanelContext& ctx, const Curve& c, int level, const ConfigValues& point) {
  ConfigValues v = ctx.base;
  layer(v, c.set);
  if (c.a0_squared) layer(v, {{"A0", cell(std::sqrt(static_cast<double>(*c.a0_squared)))}});
  if (level >= 0 && !c.fock) layer(v, {{"A0", cell(std::sqrt(static_cast<double>(level)))}});
  layer(v, point);
  return v;
}

int level_of(const Curve& c, int level) { return level >= 0 ? level : c.n; }

ordered_json curve_meta(const Curve& c, const ConfigValues& settings) {
  ordered_json m{{"column", c.column}, {"label", c.label}, {"state", c.fock ? "fock" : "coherent"}};
  if (c.fock) m["n"] = c.n;
  if (c.a0_squared) m["A0_squared"] = *c.a0_squared;
  m["quantity"] = c.quantity;
  try {
    m["D"] = nonstaticity_measure(resolve_config(settings).params).d;
  } catch (const ConfigError&) {
  }
  m["settings"] = settings;
  return m;
}

ordered_json time_series(const PanelContext& ctx, OutputSet& out) {
  const auto times = axis_values(need(ctx.panel, "x"));
  const auto curves = curves_of(ctx.panel);
  std::vector<std::vector<double>> columns(curves.size());
  ordered_json meta{{"kind", "time_series"}, {"curves", ordered_json::array()}};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto settings = settings_for(ctx, curves[c], -1, {});
    const auto rc = resolve_config(settings);
    columns[c].resize(times.size());
    parallel_for(times.size(), ctx.jobs, [&](std::size_t i) {
      columns[c][i] = evaluate(curves[c], curves[c].n, rc, times[i]);
    });
    meta["curves"].push_back(curve_meta(curves[c], settings));
  }

  std::vector<double> guides;
  if (ctx.panel.value("guides", "none") == "nodes") {
    const auto rc = resolve_config(settings_for(ctx, curves.front(), -1, {}));
    const auto nodes = TimeFunction(rc.params, rc.wave).node_times(times.front(), times.back());
    guides.assign(nodes.begin(), nodes.begin() + std::min<std::ptrdiff_t>(2, nodes.size()));
    meta["nodes"] = guides;
  }

  std::vector<std::string> header{"t"};
  for (const auto& c : curves) header.push_back(c.column);
  CsvTable table(header);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<std::string> row{cell(times[i])};
    for (const auto& col : columns) row.push_back(cell(col[i]));
    table.add_row(std::move(row));
  }

  LinePlot plot{ctx.title, "t", axis_label(curves.front().quantity), {}, guides};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    plot.series.push_back({curves[c].label, times, columns[c], curves[c].stroke, curves[c].colour});
  }
  out.add(ctx.stem + ".csv", table.str());
  out.add(ctx.stem + ".svg", render_line_plot(plot));
  return meta;
}

ordered_json parameter_scan(const PanelContext& ctx, OutputSet& out) {
  const auto& x = need(ctx.panel, "x");
  const auto xs = axis_values(x);
  const auto keys = need(x, "keys").get<std::vector<std::string>>();
  if (keys.empty()) throw PresetError("preset: parameter scan without keys");
  const double t = real_of(ctx.panel.value("t", json("0")));
  const auto curves = curves_of(ctx.panel);

  std::vector<std::vector<double>> columns(curves.size(), std::vector<double>(xs.size(), kNaN));
  std::vector<char> valid(xs.size(), 1);
  parallel_for(xs.size(), ctx.jobs, [&](std::size_t i) {
    ConfigValues point;
    for (const auto& k : keys) point[k] = cell(xs[i]);
    for (std::size_t c = 0; c < curves.size(); ++c) {
      try {
        const auto rc = resolve_config(settings_for(ctx, curves[c], -1, point));
        columns[c][i] = evaluate(curves[c], curves[c].n, rc, t);
      } catch (const ConfigError&) {
        valid[i] = 0;
      }
    }
    if (!valid[i]) {
      for (auto& col : columns) col[i] = kNaN;
    }
  });

  std::string x_name;
  for (const auto& k : keys) x_name += (x_name.empty() ? "" : "=") + k;
  std::vector<std::string> header{x_name, "valid"};
  for (const auto& c : curves) header.push_back(c.column);
  CsvTable table(header);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<std::string> row{cell(xs[i]), valid[i] ? "1" : "0"};
    for (const auto& col : columns) row.push_back(cell(col[i]));
    table.add_row(std::move(row));
  }

  ordered_json meta{{"kind", "parameter_scan"}, {"x", keys}, {"t", t}, {"curves", ordered_json::array()}};
  const auto first_valid = std::find(valid.begin(), valid.end(), 1);
  if (first_valid != valid.end()) meta["first_valid_x"] = xs[first_valid - valid.begin()];
  for (const auto& c : curves) meta["curves"].push_back(curve_meta(c, settings_for(ctx, c, -1, {})));

  LinePlot plot{ctx.title, x_name, axis_label(curves.front().quantity), {}, {}};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    plot.series.push_back({curves[c].label, xs, columns[c], curves[c].stroke, curves[c].colour});
  }
  out.add(ctx.stem + ".csv", table.str());
  out.add(ctx.stem + ".svg", render_line_plot(plot));
  return meta;
}

ordered_json level_scan(const PanelContext& ctx, OutputSet& out) {
  const auto& x = need(ctx.panel, "x");
  const int first = need(x, "start").get<int>();
  const int last = need(x, "stop").get<int>();
  if (first < 0 || last < first) throw PresetError("preset: bad level range");
  const double t = real_of(ctx.panel.value("t", json("1")));
  const auto curves = curves_of(ctx.panel);
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  std::vector<double> levels(n);
  for (std::size_t i = 0; i < n; ++i) levels[i] = first + static_cast<double>(i);

  std::vector<std::vector<double>> columns(curves.size(), std::vector<double>(n));
  for (std::size_t c = 0; c < curves.size(); ++c) {
    parallel_for(n, ctx.jobs, [&](std::size_t i) {
      const int level = first + static_cast<int>(i);
      const auto rc = resolve_config(settings_for(ctx, curves[c], level, {}));
      columns[c][i] = evaluate(curves[c], level_of(curves[c], level), rc, t);
    });
  }

  std::vector<std::string> header{"level"};
  for (const auto& c : curves) header.push_back(c.column);
  CsvTable table(header);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(first + static_cast<int>(i))};
    for (const auto& col : columns) row.push_back(cell(col[i]));
    table.add_row(std::move(row));
  }
  ordered_json meta{{"kind", "level_scan"}, {"t", t}, {"curves", ordered_json::array()}};
  for (const auto& c : curves) meta["curves"].push_back(curve_meta(c, settings_for(ctx, c, -1, {})));

  LinePlot plot{ctx.title, "A0² or n", axis_label(curves.front().quantity), {}, {}};
  for (std::size_t c = 0; c < curves.size(); ++c) {
    plot.series.push_back({curves[c].label, levels, columns[c], curves[c].stroke, curves[c].colour});
  }
  out.add(ctx.stem + ".csv", table.str());
  out.add(ctx.stem + ".svg", render_line_plot(plot));
  return meta;
}

ordered_json density_map(const PanelContext& ctx, OutputSet& out) {
  const auto& xa = need(ctx.panel, "x");
  const auto& ya = need(ctx.panel, "y");
  const auto xs = axis_values(xa);
  const auto ys = axis_values(ya);
  const std::string xkey = need(xa, "key").get<std::string>();
  const std::string ykey = need(ya, "key").get<std::string>();
  const double t = real_of(ctx.panel.value("t", json("0")));
  const auto curves = curves_of(ctx.panel);
  const std::size_t cells = xs.size() * ys.size();

  // cell k = ix * ny + iy: rows in lexicographic (x, y) order
  std::vector<std::vector<double>> columns(curves.size(), std::vector<double>(cells, kNaN));
  std::vector<char> valid(cells, 1);
  parallel_for(cells, ctx.jobs, [&](std::size_t k) {
    const ConfigValues point{{xkey, cell(xs[k / ys.size()])}, {ykey, cell(ys[k % ys.size()])}};
    for (std::size_t c = 0; c < curves.size(); ++c) {
      try {
        const auto rc = resolve_config(settings_for(ctx, curves[c], -1, point));
        columns[c][k] = evaluate(curves[c], curves[c].n, rc, t);
      } catch (const ConfigError&) {
        valid[k] = 0;
      }
    }
    if (!valid[k]) {
      for (auto& col : columns) col[k] = kNaN;
    }
  });

  std::vector<std::string> header{xkey, ykey, "valid"};
  for (const auto& c : curves) header.push_back(c.column);
  CsvTable table(header);
  for (std::size_t k = 0; k < cells; ++k) {
    std::vector<std::string> row{cell(xs[k / ys.size()]), cell(ys[k % ys.size()]), valid[k] ? "1" : "0"};
    for (const auto& col : columns) row.push_back(cell(col[k]));
    table.add_row(std::move(row));
  }

  DensityPlot plot;
  plot.title = ctx.title + ": " + curves.front().label;
  plot.x_label = xkey;
  plot.y_label = ykey;
  plot.nx = static_cast<int>(xs.size());
  plot.ny = static_cast<int>(ys.size());
  plot.x_min = xs.front();
  plot.x_max = xs.back();
  plot.y_min = ys.front();
  plot.y_max = ys.back();
  plot.values.resize(cells);
  plot.valid.resize(cells);
  for (std::size_t iy = 0; iy < ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
      const std::size_t k = ix * ys.size() + iy;
      plot.values[iy * xs.size() + ix] = columns.front()[k];
      plot.valid[iy * xs.size() + ix] = valid[k] != 0;
    }
  }
  ordered_json meta{{"kind", "density_map"}, {"x", xkey}, {"y", ykey}, {"t", t},
                    {"invalid_cells", std::count(valid.begin(), valid.end(), 0)},
                    {"curves", ordered_json::array()}};
  for (const auto& c : curves) meta["curves"].push_back(curve_meta(c, settings_for(ctx, c, -1, {})));
  out.add(ctx.stem + ".csv", table.str());
  out.add(ctx.stem + ".svg", render_density_plot(plot));
  return meta;
}

ordered_json probability_density(const PanelContext& ctx, OutputSet& out) {
  const auto times = axis_values(need(ctx.panel, "x"));
  const int q_points = ctx.panel.value("q_points", 161);
  const auto rc = resolve_config(ctx.base);
  const auto span = trajectory_q_grid(rc.params, rc.wave);
  const QGrid grid{span.q_min, span.q_max, q_points};
  grid.validate();

  std::vector<std::vector<double>> density(times.size());
  parallel_for(times.size(), ctx.jobs, [&](std::size_t i) {
    const auto field = sample_coherent(rc.params, rc.wave, grid, times[i]);
    density[i].resize(field.values.size());
    for (std::size_t j = 0; j < field.values.size(); ++j) density[i][j] = std::norm(field.values[j]);
  });

  CsvTable table({"t", "q", "abs2"});
  DensityPlot plot;
  plot.title = ctx.title + ": probability density";
  plot.x_label = "t";
  plot.y_label = "q";
  plot.nx = static_cast<int>(times.size());
  plot.ny = q_points;
  plot.x_min = times.front();
  plot.x_max = times.back();
  plot.y_min = grid.q_min;
  plot.y_max = grid.q_max;
  plot.values.resize(times.size() * q_points);
  plot.valid.assign(plot.values.size(), true);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (int j = 0; j < q_points; ++j) {
      table.add_row({cell(times[i]), cell(grid.at(j)), cell(density[i][j])});
      plot.values[static_cast<std::size_t>(j) * times.size() + i] = density[i][j];
    }
  }
  out.add(ctx.stem + ".csv", table.str());
  out.add(ctx.stem + ".svg", render_density_plot(plot));
  return {{"kind", "probability_density"}, {"q_min", grid.q_min}, {"q_max", grid.q_max},
          {"q_points", q_points}, {"settings", ctx.base}};
}

bool natural_less(const std::string& a, const std::string& b) {
  return a.size() != b.size() ? a.size() < b.size() : a < b;
}

}  // namespace

fs::path preset_directory(const std::optional<fs::path>& override_dir) {
  if (override_dir) return *override_dir;
  std::error_code ec;
  const auto exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const auto beside = exe.parent_path() / "presets";
    if (fs::is_directory(beside)) return beside;
  }
  return GEOPHASE_PRESET_SOURCE_DIR;
}

std::vector<std::string> list_presets(const fs::path& dir) {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end(), natural_less);
  return ids;
}

json load_preset_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open preset file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("preset file '" + path.string() + "': " + e.what());
  }
}

json load_preset(const fs::path& dir, const std::string& id) {
  const auto ids = list_presets(dir);
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::string valid;
    for (const auto& v : ids) valid += (valid.empty() ? "" : ", ") + v;
    throw UsageError("unknown preset '" + id + "'; valid presets: " + (valid.empty() ? "(none found)" : valid));
  }
  return load_preset_file(dir / (id + ".json"));
}

void build_figure(const json& preset, const ConfigValues& user, int jobs, OutputSet& out) {
  const std::string id = need(preset, "id").get<std::string>();
  ordered_json meta{{"figure", id},
                    {"title", preset.value("title", "")},
                    {"source", preset.value("source", "")},
                    {"caption_constants", ordered_json::object()},
                    {"panels", ordered_json::array()}};
  if (preset.contains("caption_constants")) {
    for (const auto& [k, v] : preset.at("caption_constants").items()) meta["caption_constants"][k] = v;
  }
  ConfigValues base = user;
  layer(base, values_of(preset, "base"));

  for (const auto& panel : need(preset, "panels")) {
    const std::string pid = need(panel, "id").get<std::string>();
    ConfigValues settings = base;
    layer(settings, values_of(panel, "set"));
    const PanelContext ctx{preset, panel, settings, pid, id + "_" + pid,
                           preset.value("title", id) + " (" + pid + ")", jobs};
    const std::string kind = need(panel, "kind").get<std::string>();
    ordered_json pm;
    if (kind == "time_series") {
      pm = time_series(ctx, out);
    } else if (kind == "parameter_scan") {
      pm = parameter_scan(ctx, out);
    } else if (kind == "level_scan") {
      pm = level_scan(ctx, out);
    } else if (kind == "density_map") {
      pm = density_map(ctx, out);
    } else if (kind == "probability_density") {
      pm = probability_density(ctx, out);
    } else {
      throw PresetError("preset: unknown panel kind '" + kind + "'");
    }
    ordered_json entry{{"id", pid}, {"csv", ctx.stem + ".csv"}, {"svg", ctx.stem + ".svg"}};
    for (auto& [k, v] : pm.items()) entry[k] = v;
    meta["panels"].push_back(std::move(entry));
  }
  out.add(id + "_metadata.json", meta.dump(2) + "\n");
}

}  // namespace geophase::cli
