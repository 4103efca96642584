#include "geophase/phase_engine.hpp"

#include <cmath>
#include <numbers>

#include "geophase/parallel.hpp"
#include "geophase/timefunc.hpp"

namespace geophase {

namespace {

double fock_factor(int n) { return n + 0.5; }

void require_level(int n) {
  if (n < 0) throw ParameterError("Fock level n must be nonnegative");
}

// Weighted sum shared by the geometric and dynamical rates.
double rate_tail(const GFunctions& g, double omega) {
  return g.g2 / (16.0 * omega) + 0.25 * g.g3 + 0.25 * omega * g.g4;
}

GFunctions g_closed_form(const TimeFunctionValue& v, double a0, double phase) {
  const double a2 = a0 * a0;
  const double c = std::cos(2.0 * phase);
  const double s = std::sin(2.0 * phase);
  const double plus = 2.0 * a2 * c + 2.0 * a2 + 1.0;
  GFunctions g;
  g.g1 = -(2.0 * a2 * c - 2.0 * a2 + 1.0) / v.f;
  g.g2 = v.f_dot * v.f_dot / v.f * plus;
  g.g3 = -2.0 * v.f_dot / v.f * a2 * s;
  g.g4 = v.f * plus;
  g.g1_bar = -(2.0 * a2 * c - 2.0 * a2 - 1.0) / v.f;
  return g;
}

}  // namespace

double phase_time_T(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  require_after_t0(cfg, t);
  return TimeFunction(p, cfg).phase_time(t);
}

double amplitude_a0(const NonstaticityParams& p, const WaveConfig& cfg, double t_eval) {
  require_after_t0(cfg, t_eval);
  const auto* q = std::get_if<QuadratureAmplitude>(&cfg.amplitude);
  if (q == nullptr) {
    throw ParameterError("A0 is given directly; there is no Q0 to derive it from");
  }
  const auto v = TimeFunction(p, cfg)(t_eval);
  const double classical = cfg.omega * (t_eval - cfg.t0) + cfg.theta0;
  const double c = std::cos(classical);
  const double s = std::sin(classical);
  const double root_f = std::sqrt(v.f);
  const double mixed = v.f_dot / (2.0 * cfg.omega * root_f) * c + root_f * s;
  const double bracket = c * c / v.f + mixed * mixed;
  return std::sqrt(cfg.epsilon * cfg.omega / (2.0 * cfg.hbar) * bracket) * std::abs(q->q0);
}

double resolved_a0(const NonstaticityParams& p, const WaveConfig& cfg) {
  if (const auto* a = std::get_if<EigenvalueAmplitude>(&cfg.amplitude)) return a->a0;
  return amplitude_a0(p, cfg, cfg.t0);
}

ComplexAmplitude eigenvalue_A(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  return {resolved_a0(p, cfg), cfg.omega * phase_time_T(p, cfg, t) + cfg.theta};
}

GFunctions g_functions(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  require_after_t0(cfg, t);
  const TimeFunction tf(p, cfg);
  const double phase = cfg.omega * tf.phase_time(t) + cfg.theta;
  return g_closed_form(tf(t), resolved_a0(p, cfg), phase);
}

GFunctions g_functions_from_eigenvalue(const NonstaticityParams& p, const WaveConfig& cfg,
                                       double t) {
  const auto v = eval_f(p, cfg, t);
  const std::complex<double> a = eigenvalue_A(p, cfg, t).value();
  const std::complex<double> ac = std::conj(a);
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> squares = a * a + ac * ac;
  const double norm = std::real(ac * a);
  GFunctions g;
  g.g1 = -std::real(squares - 2.0 * norm + 1.0) / v.f;
  g.g2 = v.f_dot * v.f_dot / v.f * std::real(squares + 2.0 * norm + 1.0);
  g.g3 = std::real(i * v.f_dot / v.f * (ac * ac - a * a));
  g.g4 = v.f * std::real(squares + 2.0 * norm + 1.0);
  g.g1_bar = -std::real(squares - 2.0 * norm - 1.0) / v.f;
  return g;
}

double gamma_g_rate(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const auto g = g_functions(p, cfg, t);
  return 0.25 * cfg.omega * g.g1 + rate_tail(g, cfg.omega);
}

double gamma_d_integrand(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const auto g = g_functions(p, cfg, t);
  return -(0.25 * cfg.omega * g.g1_bar + rate_tail(g, cfg.omega));
}

double gamma_d_rate(const NonstaticityParams& p, const WaveConfig& cfg) {
  const double a2 = std::pow(resolved_a0(p, cfg), 2);
  const double phi = p.phi();
  const double th = cfg.theta;
  const double k1 = p.c1() * std::pow(std::sin(phi), 2) + p.c2() * std::pow(std::cos(phi), 2) +
                    p.c3() * std::sin(2.0 * phi);
  const double k2 = (p.c1() - p.c2()) * std::sin(2.0 * phi) + 2.0 * p.c3() * std::cos(2.0 * phi);
  const double sin_th = std::sin(th);
  const double cos_th = std::cos(th);
  const double bracket = 4.0 * (1.0 + 4.0 * a2 * sin_th * sin_th) +
                         (1.0 + 4.0 * a2 * cos_th * cos_th) * (4.0 * k1 * k1 + k2 * k2) -
                         8.0 * a2 * std::sin(2.0 * th) * k2;
  return -cfg.omega / (16.0 * k1) * bracket;
}

double gamma_g(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const double T = phase_time_T(p, cfg, t);
  return -0.5 * cfg.omega * T - gamma_d_rate(p, cfg) * (t - cfg.t0) + cfg.gamma_g0;
}

double gamma_d(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  require_after_t0(cfg, t);
  return gamma_d_rate(p, cfg) * (t - cfg.t0) + cfg.gamma_d0;
}

PhaseSample gamma_total(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const double T = phase_time_T(p, cfg, t);
  const double rate = gamma_d_rate(p, cfg);
  const double elapsed = t - cfg.t0;
  const double w = cfg.omega;
  PhaseSample s;
  s.t = t;
  s.gamma_nl = -0.5 * w * (T - elapsed);
  // gamma_G(t0) is carried by the linear part
  s.gamma_l = -(rate + 0.5 * w) * elapsed + cfg.gamma_g0;
  s.gamma_g = s.gamma_nl + s.gamma_l;
  s.gamma_d = rate * elapsed + cfg.gamma_d0;
  s.gamma_total = -0.5 * w * T + cfg.gamma_g0 + cfg.gamma_d0;
  return s;
}

PhaseSample fock_phases(const NonstaticityParams& p, const WaveConfig& cfg, int n, double t) {
  require_level(n);
  const double T = phase_time_T(p, cfg, t);
  const double elapsed = t - cfg.t0;
  const double w = cfg.omega;
  const double k = fock_factor(n);
  const double mean_f = 0.5 * (p.c1() + p.c2());
  PhaseSample s;
  s.t = t;
  s.gamma_nl = -k * w * (T - elapsed);
  s.gamma_l = k * w * (mean_f - 1.0) * elapsed + cfg.gamma_g0;
  s.gamma_g = k * (mean_f * w * elapsed - w * T) + cfg.gamma_g0;
  s.gamma_d = -k * mean_f * w * elapsed + cfg.gamma_d0;
  s.gamma_total = -k * w * T + cfg.gamma_g0 + cfg.gamma_d0;
  return s;
}

std::vector<PhaseSample> phase_trajectory(const NonstaticityParams& p, const WaveConfig& cfg,
                                          std::span<const double> times, int jobs) {
  std::vector<PhaseSample> out(times.size());
  parallel_for(times.size(), jobs, [&](std::size_t i) { out[i] = gamma_total(p, cfg, times[i]); });
  return out;
}

double mean_geometric_slope(const NonstaticityParams& p, const WaveConfig& cfg) {
  return -0.5 * cfg.omega - gamma_d_rate(p, cfg);
}

double fock_mean_geometric_slope(const NonstaticityParams& p, const WaveConfig& cfg, int n) {
  require_level(n);
  return fock_factor(n) * cfg.omega * (0.5 * (p.c1() + p.c2()) - 1.0);
}

double wrap_phase(double phase) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(phase, two_pi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

}  // namespace geophase
