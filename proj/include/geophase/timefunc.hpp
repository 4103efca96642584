#pragma once

#include <vector>

#include "geophase/params.hpp"

namespace geophase {

struct TimeFunctionValue {
  double f = 1.0;
  double f_dot = 0.0;
  double f_ddot = 0.0;
};

/// The nonstatic time function
///
///   f(t) = a1 sin^2(x) + a2 cos^2(x) + a3 sin(2x),   x = omega (t - t0) + phi,
///
/// with (a1, a2, a3) = (c1, c2, c3) unless the config's fddot_scale hook
/// rescales the oscillating part. Evaluation does not check t >= t0; the
/// public free functions below do.
class TimeFunction {
 public:
  TimeFunction(const NonstaticityParams& p, const WaveConfig& cfg);

  TimeFunctionValue operator()(double t) const noexcept;

  /// Branch-continuous integral of 1/f from t0 to t.
  double phase_time(double t) const noexcept;

  double mean() const noexcept { return 0.5 * (a1_ + a2_); }
  double minimum() const noexcept { return mean() - amplitude_; }
  double maximum() const noexcept { return mean() + amplitude_; }

  /// Instants in [t_begin, t_end] where f is minimal (the wave packet is
  /// narrowest). Empty for the static wave.
  std::vector<double> node_times(double t_begin, double t_end) const;

  /// Instants in [t_begin, t_end] where tan(x) is singular, i.e. where the
  /// principal-branch arctangent of the phase-time formula jumps by pi.
  std::vector<double> branch_times(double t_begin, double t_end) const;

  double omega() const noexcept { return omega_; }
  double t0() const noexcept { return t0_; }

 private:
  double lift(double x) const noexcept;

  double a1_;
  double a2_;
  double a3_;
  double sqrt_det_;
  double phi_;
  double omega_;
  double t0_;
  double amplitude_;  // half peak-to-peak of f
  double node_shift_; // x of the first f minimum, modulo pi
  double lift_at_t0_;
};

/// f, f_dot, f_ddot at t; throws DomainError for t < t0.
TimeFunctionValue eval_f(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// f_ddot - [f_dot^2 / (2f) - 2 omega^2 (f - 1/f)]; vanishes for every
/// admissible parameter set.
double ode_residual(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Q0 cos(omega (t - t0) + theta0). Requires a quadrature amplitude.
double classical_trajectory(const WaveConfig& cfg, double t);

/// Throws DomainError when t < cfg.t0.
void require_after_t0(const WaveConfig& cfg, double t);

}  // namespace geophase
