#pragma once

#include <complex>
#include <span>
#include <vector>

#include "geophase/params.hpp"

namespace geophase {

/// Eigenvalue A(t) = a0 exp(-i accumulated_phase).
struct ComplexAmplitude {
  double a0 = 0.0;
  /// omega T(t) + theta, unwrapped.
  double accumulated_phase = 0.0;

  std::complex<double> value() const { return std::polar(a0, -accumulated_phase); }
};

/// Phases at one instant. For the coherent state gamma_l is the linear part
/// of the geometric phase; for Fock states the same split is applied to
/// gamma_{G,n}.
struct PhaseSample {
  double t = 0.0;
  double gamma_g = 0.0;
  double gamma_d = 0.0;
  double gamma_total = 0.0;
  double gamma_nl = 0.0;
  double gamma_l = 0.0;
};

/// Coefficients of the geometric and dynamical phase rates.
struct GFunctions {
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double g4 = 0.0;
  double g1_bar = 0.0;
};

/// Continuous, strictly increasing phase time T(t) = int_{t0}^t dt'/f(t').
double phase_time_T(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Eigenvalue modulus from the classical amplitude Q0, evaluated with f, f_dot
/// and the classical phase at t_eval. Constant in t_eval.
double amplitude_a0(const NonstaticityParams& p, const WaveConfig& cfg, double t_eval);

/// A0 as configured: given directly, or from Q0 at t0.
double resolved_a0(const NonstaticityParams& p, const WaveConfig& cfg);

ComplexAmplitude eigenvalue_A(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Closed forms in terms of A0 and omega T + theta.
GFunctions g_functions(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Same coefficients built from the complex eigenvalue A and its conjugate;
/// an independent algebraic route used for cross-checking.
GFunctions g_functions_from_eigenvalue(const NonstaticityParams& p, const WaveConfig& cfg,
                                       double t);

/// Geometric phase rate Gamma_G(t).
double gamma_g_rate(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Dynamical phase rate integrand Gamma_D(t) evaluated at t from the g-functions.
/// It is a constant of motion; gamma_d_rate() is the production value.
double gamma_d_integrand(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Gamma_D evaluated at t = t0 through the kappa helpers
///   kappa1 = c1 sin^2 phi + c2 cos^2 phi + c3 sin 2phi,
///   kappa2 = (c1 - c2) sin 2phi + 2 c3 cos 2phi.
double gamma_d_rate(const NonstaticityParams& p, const WaveConfig& cfg);

/// gamma_G(t) = -omega T(t) / 2 - Gamma_D (t - t0) + gamma_G(t0).
double gamma_g(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// gamma_D(t) = Gamma_D (t - t0) + gamma_D(t0).
double gamma_d(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Full coherent-state phase sample, including the linear/nonlinear split.
PhaseSample gamma_total(const NonstaticityParams& p, const WaveConfig& cfg, double t);

/// Geometric, dynamical and total phase of the n-th Fock state. The initial
/// phases are taken from cfg.gamma_g0 and cfg.gamma_d0.
PhaseSample fock_phases(const NonstaticityParams& p, const WaveConfig& cfg, int n, double t);

/// Evaluates gamma_total on every time, split across `jobs` worker threads.
/// Output order follows `times`.
std::vector<PhaseSample> phase_trajectory(const NonstaticityParams& p, const WaveConfig& cfg,
                                          std::span<const double> times, int jobs = 1);

/// Long-run average slope of the coherent geometric phase:
/// -omega/2 - Gamma_D (the mean of 1/f over a period is 1).
double mean_geometric_slope(const NonstaticityParams& p, const WaveConfig& cfg);

/// Average slope of gamma_{G,n}: (n + 1/2) omega ((c1 + c2)/2 - 1).
double fock_mean_geometric_slope(const NonstaticityParams& p, const WaveConfig& cfg, int n);

/// Reduces a phase to (-pi, pi] for display.
double wrap_phase(double phase) noexcept;

}  // namespace geophase
