#include "geophase/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>

#include "geophase/format.hpp"
#include "geophase/phase_engine.hpp"
#include "geophase/stencil.hpp"
#include "geophase/timefunc.hpp"

namespace geophase {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr int kMaxGridPoints = 1 << 18;

// Everything about the state at one instant that does not depend on q.
struct Snapshot {
  double zeta;
  double envelope;  // (zeta/pi)^(1/4)
  cplx chirp;       // zeta/2 (1 - i f_dot / (2 omega))
  cplx eigenvalue;  // A(t)
  double a0;
  double omega_T;
  double initial_phase;  // gamma(t0) = gamma_n(t0)
};

Snapshot snapshot(const NonstaticityParams& p, const WaveConfig& cfg, double t, double a0) {
  const TimeFunction tf(p, cfg);
  const auto v = tf(t);
  Snapshot s;
  s.zeta = cfg.epsilon * cfg.omega / (cfg.hbar * v.f);
  s.envelope = std::pow(s.zeta / pi, 0.25);
  s.chirp = 0.5 * s.zeta * cplx(1.0, -v.f_dot / (2.0 * cfg.omega));
  s.a0 = a0;
  s.omega_T = cfg.omega * tf.phase_time(t);
  s.eigenvalue = std::polar(a0, -(s.omega_T + cfg.theta));
  s.initial_phase = cfg.gamma_g0 + cfg.gamma_d0;
  return s;
}

cplx coherent_value(const Snapshot& s, double q) {
  const cplx& a = s.eigenvalue;
  const cplx exponent =
      -s.chirp * q * q + std::sqrt(2.0 * s.zeta) * a * q - 0.5 * s.a0 * s.a0 - 0.5 * a * a;
  return s.envelope * std::exp(exponent);
}

double total_phase(const Snapshot& s) { return -0.5 * s.omega_T + s.initial_phase; }

double fock_phase(const Snapshot& s, int n) { return -(n + 0.5) * s.omega_T + s.initial_phase; }

// 1/sqrt(2^n n!) in log space.
double hermite_norm(int n) {
  return std::exp(-0.5 * (n * std::numbers::ln2 + std::lgamma(n + 1.0)));
}

cplx fock_value(const Snapshot& s, int n, double q) {
  const double x = std::sqrt(s.zeta) * q;
  return s.envelope * hermite_norm(n) * hermite(n, x) * std::exp(-s.chirp * q * q);
}

void require_level(int n) {
  if (n < 0) throw ParameterError("Fock level n must be nonnegative");
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double sum = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += v[i];
  return sum * h;
}

// Packet geometry shared by both grid policies.
struct Extent {
  double length;      // sqrt(hbar / (epsilon omega))
  double core;        // 8 sqrt(hbar f_max / (epsilon omega))
  double displacement;
  double step_needed;
};

Extent packet_extent(const NonstaticityParams& p, const WaveConfig& cfg) {
  const TimeFunction tf(p, cfg);
  const double a0 = resolved_a0(p, cfg);
  Extent e;
  e.length = std::sqrt(cfg.hbar / (cfg.epsilon * cfg.omega));
  e.core = 8.0 * e.length * std::sqrt(tf.maximum());
  e.displacement = std::sqrt(2.0 * tf.maximum()) * e.length * a0;
  const double sigma_min = e.length * std::sqrt(tf.minimum() / 2.0);
  const double k_max =
      (6.0 * std::sqrt(tf.mean()) + std::sqrt(2.0 / tf.minimum()) * a0) / e.length;
  e.step_needed = std::min(sigma_min / 20.0, 0.05 / k_max);
  return e;
}

int points_for(double half_width, double step_needed, int min_points) {
  const double needed = std::ceil(2.0 * half_width / step_needed) + 1.0;
  return static_cast<int>(std::clamp(needed, static_cast<double>(std::max(min_points, 2)),
                                     static_cast<double>(kMaxGridPoints)));
}

}  // namespace

void QGrid::validate() const {
  if (n_points < 2) throw ParameterError("q-grid needs at least two points");
  if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max)) {
    throw ParameterError("q-grid range must be finite with q_max > q_min");
  }
}

double hermite(int n, double x, int n_max) {
  if (n < 0) throw ParameterError("Hermite order must be nonnegative");
  if (n > n_max) {
    std::ostringstream msg;
    msg << "Hermite order " << n << " exceeds the limit " << n_max;
    throw ParameterError(msg.str());
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

ZetaValue zeta_at(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const auto v = eval_f(p, cfg, t);
  return {cfg.epsilon * cfg.omega / (cfg.hbar * v.f)};
}

std::complex<double> fock_eigenfunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                        int n, double q, double t) {
  require_level(n);
  require_after_t0(cfg, t);
  return fock_value(snapshot(p, cfg, t, 0.0), n, q);
}

std::complex<double> fock_wavefunction(const NonstaticityParams& p, const WaveConfig& cfg, int n,
                                       double q, double t) {
  require_level(n);
  require_after_t0(cfg, t);
  const auto s = snapshot(p, cfg, t, 0.0);
  return fock_value(s, n, q) * std::polar(1.0, fock_phase(s, n));
}

std::complex<double> coherent_eigenfunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                            double q, double t) {
  require_after_t0(cfg, t);
  return coherent_value(snapshot(p, cfg, t, resolved_a0(p, cfg)), q);
}

std::complex<double> coherent_wavefunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                           double q, double t) {
  require_after_t0(cfg, t);
  const auto s = snapshot(p, cfg, t, resolved_a0(p, cfg));
  return coherent_value(s, q) * std::polar(1.0, total_phase(s));
}

FieldGrid sample_coherent(const NonstaticityParams& p, const WaveConfig& cfg, const QGrid& grid,
                          double t, PhaseFactor phase) {
  grid.validate();
  const auto s = snapshot(p, cfg, t, resolved_a0(p, cfg));
  cplx factor(1.0);
  if (phase == PhaseFactor::with_total_phase) factor = std::polar(1.0, total_phase(s));
  if (phase == PhaseFactor::dynamical_only) factor = std::polar(1.0, gamma_d(p, cfg, t));
  FieldGrid out{grid, t, std::vector<cplx>(grid.n_points)};
  for (int i = 0; i < grid.n_points; ++i) out.values[i] = coherent_value(s, grid.at(i)) * factor;
  return out;
}

FieldGrid sample_fock(const NonstaticityParams& p, const WaveConfig& cfg, const QGrid& grid,
                      int n, double t, PhaseFactor phase) {
  require_level(n);
  grid.validate();
  const auto s = snapshot(p, cfg, t, 0.0);
  cplx factor(1.0);
  if (phase == PhaseFactor::with_total_phase) factor = std::polar(1.0, fock_phase(s, n));
  if (phase == PhaseFactor::dynamical_only) factor = std::polar(1.0, fock_phases(p, cfg, n, t).gamma_d);
  FieldGrid out{grid, t, std::vector<cplx>(grid.n_points)};
  for (int i = 0; i < grid.n_points; ++i) out.values[i] = fock_value(s, n, grid.at(i)) * factor;
  return out;
}

QGrid default_q_grid(const NonstaticityParams& p, const WaveConfig& cfg, double t,
                     int min_points) {
  const auto e = packet_extent(p, cfg);
  const auto s = snapshot(p, cfg, t, resolved_a0(p, cfg));
  const double peak = std::sqrt(2.0 / s.zeta) * s.eigenvalue.real();
  const double half = e.core + e.displacement;
  return {peak - half, peak + half, points_for(half, e.step_needed, min_points)};
}

QGrid trajectory_q_grid(const NonstaticityParams& p, const WaveConfig& cfg, int min_points) {
  const auto e = packet_extent(p, cfg);
  const double half = e.core + e.displacement;
  return {-half, half, points_for(half, e.step_needed, min_points)};
}

double trapezoid_norm(const FieldGrid& field) {
  std::vector<double> density(field.values.size());
  std::transform(field.values.begin(), field.values.end(), density.begin(),
                 [](const cplx& v) { return std::norm(v); });
  return trapezoid(density, field.grid.step());
}

std::complex<double> inner_product(const FieldGrid& a, const FieldGrid& b) {
  if (a.values.size() != b.values.size()) throw ParameterError("fields are on different grids");
  const std::size_t n = a.values.size();
  if (n < 2) return {};
  cplx sum = 0.5 * (std::conj(a.values.front()) * b.values.front() +
                    std::conj(a.values.back()) * b.values.back());
  for (std::size_t i = 1; i + 1 < n; ++i) sum += std::conj(a.values[i]) * b.values[i];
  return sum * a.grid.step();
}

FieldGrid apply_annihilation(const NonstaticityParams& p, const WaveConfig& cfg,
                             const FieldGrid& field) {
  const auto v = TimeFunction(p, cfg)(field.t);
  const double zeta = cfg.epsilon * cfg.omega / (cfg.hbar * v.f);
  const cplx position_coef =
      std::sqrt(zeta / 2.0) * cplx(1.0, -v.f_dot / (2.0 * cfg.omega));
  // i sqrt(f / (2 epsilon omega hbar)) p with p = -i hbar d/dq
  const double derivative_coef = 1.0 / std::sqrt(2.0 * zeta);
  const auto d = stencil::first_derivative<cplx>(field.values, field.grid.step());
  FieldGrid out{field.grid, field.t, std::vector<cplx>(field.values.size())};
  const std::size_t n = field.values.size();
  for (std::size_t i = 2; i + 2 < n; ++i) {
    out.values[i] = position_coef * field.grid.at(static_cast<int>(i)) * field.values[i] +
                    derivative_coef * d[i];
  }
  return out;
}

ExpansionCoefficients expansion_coefficients(const NonstaticityParams& p, const WaveConfig& cfg,
                                             int n_max, double t) {
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  require_after_t0(cfg, t);
  const double a0 = resolved_a0(p, cfg);
  const auto s = snapshot(p, cfg, t, a0);
  ExpansionCoefficients out;
  out.b.resize(n_max + 1);
  out.a.resize(n_max + 1);
  const double gamma = total_phase(s);
  for (int n = 0; n <= n_max; ++n) {
    double modulus = 0.0;
    if (a0 > 0.0) {
      modulus = std::exp(-0.5 * a0 * a0 + n * std::log(a0) - 0.5 * std::lgamma(n + 1.0));
    } else if (n == 0) {
      modulus = 1.0;
    }
    out.b[n] = std::polar(modulus, -n * (s.omega_T + cfg.theta));
    out.a[n] = out.b[n] * std::polar(1.0, -(fock_phase(s, n) - gamma));
  }
  return out;
}

std::vector<std::complex<double>> constant_expansion_coefficients(const NonstaticityParams& p,
                                                                  const WaveConfig& cfg,
                                                                  int n_max) {
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  const double a0 = resolved_a0(p, cfg);
  // gamma_n(t0) and gamma(t0) share the configured initial phases, so only theta remains
  std::vector<cplx> a(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const double modulus =
        a0 > 0.0 ? std::exp(-0.5 * a0 * a0 + n * std::log(a0) - 0.5 * std::lgamma(n + 1.0))
                 : (n == 0 ? 1.0 : 0.0);
    a[n] = std::polar(modulus, -n * cfg.theta);
  }
  return a;
}

FieldGrid expansion_partial_sum(const NonstaticityParams& p, const WaveConfig& cfg,
                                const QGrid& grid, int n_max, double t) {
  grid.validate();
  if (n_max > kDefaultHermiteMax) {
    throw ParameterError("expansion order exceeds the Hermite limit");
  }
  const auto coeffs = expansion_coefficients(p, cfg, n_max, t);
  const auto s = snapshot(p, cfg, t, resolved_a0(p, cfg));
  std::vector<double> norms(n_max + 1);
  for (int n = 0; n <= n_max; ++n) norms[n] = hermite_norm(n);

  FieldGrid out{grid, t, std::vector<cplx>(grid.n_points)};
  for (int i = 0; i < grid.n_points; ++i) {
    const double q = grid.at(i);
    const double x = std::sqrt(s.zeta) * q;
    double prev = 0.0;
    double cur = 1.0;
    cplx sum = coeffs.b[0] * norms[0];
    for (int n = 1; n <= n_max; ++n) {
      const double next = 2.0 * x * cur - 2.0 * (n - 1) * prev;
      prev = cur;
      cur = next;
      sum += coeffs.b[n] * norms[n] * cur;
    }
    out.values[i] = s.envelope * std::exp(-s.chirp * q * q) * sum;
  }
  return out;
}

double expectation_I(const NonstaticityParams& p, const WaveConfig& cfg) {
  const double a0 = resolved_a0(p, cfg);
  return cfg.hbar * cfg.omega * (a0 * a0 + 0.5);
}

double expectation_H(const NonstaticityParams& p, const WaveConfig& cfg) {
  return -cfg.hbar * gamma_d_rate(p, cfg);
}

double grid_expectation_H(const WaveConfig& cfg, const FieldGrid& field) {
  const auto& v = field.values;
  const double h = field.grid.step();
  const auto lap = stencil::second_derivative<cplx>(v, h);
  const double kinetic = -cfg.hbar * cfg.hbar / (2.0 * cfg.epsilon);
  const double spring = 0.5 * cfg.epsilon * cfg.omega * cfg.omega;
  std::vector<double> energy(v.size(), 0.0);
  std::vector<double> density(v.size(), 0.0);
  for (std::size_t i = 2; i + 2 < v.size(); ++i) {
    const double q = field.grid.at(static_cast<int>(i));
    energy[i] = std::real(std::conj(v[i]) * (kinetic * lap[i] + spring * q * q * v[i]));
    density[i] = std::norm(v[i]);
  }
  return trapezoid(energy, h) / trapezoid(density, h);
}

double grid_number_expectation(const NonstaticityParams& p, const WaveConfig& cfg,
                               const FieldGrid& field) {
  return trapezoid_norm(apply_annihilation(p, cfg, field)) / trapezoid_norm(field);
}

void write_field_csv(std::ostream& out, const FieldGrid& field) {
  out << "q,re,im,abs2\n";
  for (int i = 0; i < field.grid.n_points; ++i) {
    const cplx& v = field.values[i];
    out << format_real(field.grid.at(i)) << ',' << format_real(v.real()) << ','
        << format_real(v.imag()) << ',' << format_real(std::norm(v)) << '\n';
  }
}

}  // namespace geophase
