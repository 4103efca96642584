#include "geophase/timefunc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace geophase {

namespace {
constexpr double pi = std::numbers::pi;
}

TimeFunction::TimeFunction(const NonstaticityParams& p, const WaveConfig& cfg)
    : a1_(p.c1()), a2_(p.c2()), a3_(p.c3()), phi_(p.phi()), omega_(cfg.omega), t0_(cfg.t0) {
  if (cfg.fddot_scale != 1.0) {
    const double m = 0.5 * (p.c1() + p.c2());
    a1_ = m + cfg.fddot_scale * (p.c1() - m);
    a2_ = m + cfg.fddot_scale * (p.c2() - m);
    a3_ = cfg.fddot_scale * p.c3();
  }
  const double det = a1_ * a2_ - a3_ * a3_;
  if (!(a1_ > 0.0 && a2_ > 0.0 && det > 0.0)) {
    std::ostringstream msg;
    msg << "time function is not positive for fddot_scale=" << cfg.fddot_scale;
    throw ParameterError(msg.str());
  }
  sqrt_det_ = std::sqrt(det);
  const double half_diff = 0.5 * (a1_ - a2_);
  amplitude_ = std::hypot(half_diff, a3_);
  node_shift_ = -0.5 * std::atan2(a3_, half_diff);
  lift_at_t0_ = lift(phi_);
}

TimeFunctionValue TimeFunction::operator()(double t) const noexcept {
  const double x = omega_ * (t - t0_) + phi_;
  const double s = std::sin(x);
  const double c = std::cos(x);
  const double s2 = 2.0 * s * c;
  const double c2 = c * c - s * s;
  TimeFunctionValue v;
  v.f = a1_ * s * s + a2_ * c * c + a3_ * s2;
  v.f_dot = omega_ * ((a1_ - a2_) * s2 + 2.0 * a3_ * c2);
  v.f_ddot = 2.0 * omega_ * omega_ * ((a1_ - a2_) * c2 - 2.0 * a3_ * s2);
  return v;
}

// Continuous antiderivative of 1/f in the variable x (up to the factor omega):
// atan((a3 + a1 tan x) / s) / s, with pi/s added for every tan singularity
// crossed so the result never jumps.
double TimeFunction::lift(double x) const noexcept {
  const double branch = std::floor((x + pi / 2.0) / pi);
  const double y = x - branch * pi;  // in [-pi/2, pi/2)
  const double cy = std::max(0.0, std::cos(y));
  const double angle = std::atan2(a3_ * cy + a1_ * std::sin(y), sqrt_det_ * cy);
  return (angle + branch * pi) / sqrt_det_;
}

double TimeFunction::phase_time(double t) const noexcept {
  if (a1_ == 1.0 && a2_ == 1.0 && a3_ == 0.0) return t - t0_;
  const double x = omega_ * (t - t0_) + phi_;
  return (lift(x) - lift_at_t0_) / omega_;
}

std::vector<double> TimeFunction::node_times(double t_begin, double t_end) const {
  std::vector<double> out;
  if (amplitude_ == 0.0 || t_end < t_begin) return out;
  const double x_begin = omega_ * (t_begin - t0_) + phi_;
  for (double m = std::ceil((x_begin - node_shift_) / pi);; m += 1.0) {
    const double t = t0_ + (m * pi + node_shift_ - phi_) / omega_;
    if (t > t_end) break;
    if (t >= t_begin) out.push_back(t);
  }
  return out;
}

std::vector<double> TimeFunction::branch_times(double t_begin, double t_end) const {
  std::vector<double> out;
  if (t_end < t_begin) return out;
  const double x_begin = omega_ * (t_begin - t0_) + phi_;
  for (double m = std::ceil(x_begin / pi - 0.5);; m += 1.0) {
    const double t = t0_ + ((m + 0.5) * pi - phi_) / omega_;
    if (t > t_end) break;
    if (t >= t_begin) out.push_back(t);
  }
  return out;
}

void require_after_t0(const WaveConfig& cfg, double t) {
  if (!(t >= cfg.t0)) {
    std::ostringstream msg;
    msg << "t must not precede t0 (t=" << t << ", t0=" << cfg.t0 << ")";
    throw DomainError(msg.str());
  }
}

TimeFunctionValue eval_f(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  require_after_t0(cfg, t);
  return TimeFunction(p, cfg)(t);
}

double ode_residual(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const auto v = eval_f(p, cfg, t);
  const double w2 = cfg.omega * cfg.omega;
  return v.f_ddot - (v.f_dot * v.f_dot / (2.0 * v.f) - 2.0 * w2 * (v.f - 1.0 / v.f));
}

double classical_trajectory(const WaveConfig& cfg, double t) {
  require_after_t0(cfg, t);
  const auto* q = std::get_if<QuadratureAmplitude>(&cfg.amplitude);
  if (q == nullptr) {
    throw ParameterError("classical trajectory needs Q0; the config specifies A0");
  }
  return q->q0 * std::cos(cfg.omega * (t - cfg.t0) + cfg.theta0);
}

}  // namespace geophase
