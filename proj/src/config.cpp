#include "geophase/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "geophase/format.hpp"

namespace geophase {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_plain(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

double get_real(const ConfigValues& v, const std::string& key, double fallback) {
  const auto it = v.find(key);
  if (it == v.end()) return fallback;
  try {
    return parse_real(it->second);
  } catch (const ConfigError&) {
    throw ConfigError("invalid value for '" + key + "': '" + it->second + "'");
  }
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = {
      "c1",    "c2",    "c3_sign", "phi",      "epsilon",  "mu",      "omega",
      "k",     "hbar",  "t0",      "Q0",       "A0",       "theta",   "theta0",
      "gamma_g0", "gamma_d0", "fddot_scale"};
  return keys;
}

double parse_real(const std::string& raw) {
  const std::string text = trim(raw);
  double value = 0.0;
  if (parse_plain(text, value)) return value;

  // [sign][coef*]pi[/den]
  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string::npos) throw ConfigError("not a number: '" + text + "'");
  std::string head = trim(text.substr(0, pi_pos));
  std::string tail = trim(text.substr(pi_pos + 2));
  double coef = 1.0;
  if (!head.empty()) {
    if (head == "-") {
      coef = -1.0;
    } else if (head == "+") {
      coef = 1.0;
    } else {
      if (head.back() != '*') throw ConfigError("not a number: '" + text + "'");
      head = trim(head.substr(0, head.size() - 1));
      if (!parse_plain(head, coef)) throw ConfigError("not a number: '" + text + "'");
    }
  }
  double den = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("not a number: '" + text + "'");
    if (!parse_plain(trim(tail.substr(1)), den) || den == 0.0) {
      throw ConfigError("not a number: '" + text + "'");
    }
  }
  return coef * std::numbers::pi / den;
}

ConfigValues parse_config(std::istream& in, const std::string& source_name) {
  ConfigValues values;
  const auto& keys = known_config_keys();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = source_name + ", line " + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(where + ": empty key or value in '" + line + "'");
    }
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    try {
      (void)parse_real(value);
    } catch (const ConfigError&) {
      throw ConfigError(where + ": invalid value for '" + key + "': '" + value + "'");
    }
    values[key] = value;
  }
  return values;
}

ConfigValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

ConfigValues merge_config(ConfigValues base, const ConfigValues& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
  return base;
}

ResolvedConfig resolve_config(const ConfigValues& v) {
  ResolvedConfig out;
  WaveConfig& w = out.wave;
  w.epsilon = get_real(v, "epsilon", w.epsilon);
  w.mu = get_real(v, "mu", w.mu);
  w.hbar = get_real(v, "hbar", w.hbar);
  w.t0 = get_real(v, "t0", w.t0);
  w.theta = get_real(v, "theta", w.theta);
  w.theta0 = get_real(v, "theta0", w.theta0);
  w.gamma_g0 = get_real(v, "gamma_g0", w.gamma_g0);
  w.gamma_d0 = get_real(v, "gamma_d0", w.gamma_d0);
  w.fddot_scale = get_real(v, "fddot_scale", w.fddot_scale);

  const bool has_omega = v.count("omega") != 0;
  const bool has_k = v.count("k") != 0;
  if (has_omega && has_k) {
    out.warnings.push_back("both omega and k given; using omega");
  }
  if (has_omega) {
    w.omega = get_real(v, "omega", w.omega);
  } else if (has_k) {
    try {
      w.omega = omega_from_medium(get_real(v, "k", 1.0), w.epsilon, w.mu);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }

  const bool has_a0 = v.count("A0") != 0;
  const bool has_q0 = v.count("Q0") != 0;
  if (has_a0) {
    w.amplitude = EigenvalueAmplitude{get_real(v, "A0", 0.0)};
    if (has_q0) out.warnings.push_back("both Q0 and A0 given; A0 takes precedence");
  } else if (has_q0) {
    w.amplitude = QuadratureAmplitude{get_real(v, "Q0", 1.0)};
  }

  const double sign = get_real(v, "c3_sign", 1.0);
  if (sign != 1.0 && sign != -1.0) throw ConfigError("c3_sign must be +1 or -1");

  try {
    w.validate();
    out.params = make_params(get_real(v, "c1", 1.0), get_real(v, "c2", 1.0),
                             sign > 0 ? Branch::plus : Branch::minus,
                             get_real(v, "phi", 0.0));
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return out;
}

std::string describe_config(const ResolvedConfig& cfg) {
  const auto& p = cfg.params;
  const auto& w = cfg.wave;
  std::ostringstream os;
  os << "c1 = " << format_real(p.c1()) << '\n'
     << "c2 = " << format_real(p.c2()) << '\n'
     << "c3_sign = " << (p.c3() < 0.0 ? "-1" : "1") << "  # c3 = " << format_real(p.c3()) << '\n'
     << "phi = " << format_real(p.phi()) << '\n'
     << "epsilon = " << format_real(w.epsilon) << '\n'
     << "mu = " << format_real(w.mu) << '\n'
     << "omega = " << format_real(w.omega) << '\n'
     << "hbar = " << format_real(w.hbar) << '\n'
     << "t0 = " << format_real(w.t0) << '\n';
  if (const auto* a = std::get_if<EigenvalueAmplitude>(&w.amplitude)) {
    os << "A0 = " << format_real(a->a0) << '\n';
  } else {
    os << "Q0 = " << format_real(std::get<QuadratureAmplitude>(w.amplitude).q0) << '\n';
  }
  os << "theta = " << format_real(w.theta) << '\n'
     << "theta0 = " << format_real(w.theta0) << '\n'
     << "gamma_g0 = " << format_real(w.gamma_g0) << '\n'
     << "gamma_d0 = " << format_real(w.gamma_d0) << '\n';
  if (w.fddot_scale != 1.0) os << "fddot_scale = " << format_real(w.fddot_scale) << '\n';
  return os.str();
}

}  // namespace geophase
