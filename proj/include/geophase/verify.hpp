#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geophase/params.hpp"
#include "geophase/wavefunction.hpp"

namespace geophase {

inline constexpr double kQuadratureTolerance = 1e-11;

/// Raised when adaptive quadrature cannot reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
  /// True when 100 eps int|f| exceeded the requested tolerance and was used instead.
  bool roundoff_limited = false;
};

/// Globally adaptive bisection with a 15-point Gauss-Kronrod rule per panel.
/// `breakpoints` inside (a, b) always start new panels. The target is abs_tol,
/// raised to 100 eps int|f| when that round-off floor is larger. Throws
/// QuadratureError if the summed error estimate stays above the target.
QuadratureResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints = {},
                                    double abs_tol = kQuadratureTolerance,
                                    int max_panels = 100000);

/// Quadrature of 1/f from t0 to t.
QuadratureResult quad_T(const NonstaticityParams& p, const WaveConfig& cfg, double t,
                        double abs_tol = kQuadratureTolerance);

/// gamma_G(t0) plus the quadrature of Gamma_G(t').
QuadratureResult quad_gamma_g(const NonstaticityParams& p, const WaveConfig& cfg, double t,
                              double abs_tol = kQuadratureTolerance);

/// gamma_D(t0) plus the quadrature of the Gamma_D(t') integrand.
QuadratureResult quad_gamma_d(const NonstaticityParams& p, const WaveConfig& cfg, double t,
                              double abs_tol = kQuadratureTolerance);

struct ResidualReport {
  std::string name;
  double max_abs = 0.0;
  double rms = 0.0;
  std::string grid_meta;
  double tolerance_used = 0.0;
  bool pass = false;
  std::string diagnostic;
};

/// Uniform time grid, endpoints included.
struct TimeGrid {
  double start = 0.0;
  double stop = 1.0;
  int n_points = 2;

  double step() const noexcept { return (stop - start) / (n_points - 1); }
  double at(int i) const noexcept { return start + i * step(); }
};

struct SchrodingerOptions {
  PhaseFactor phase = PhaseFactor::with_total_phase;
  /// Applied to the rms of the normalized residual.
  double tolerance = 1e-5;
  int jobs = 1;
};

/// Largest time step accepted by schrodinger_residual:
/// 2 pi / (200 omega max(1, c1, c2)).
double max_schrodinger_time_step(const NonstaticityParams& p, const WaveConfig& cfg);

/// Time grid starting two steps after t0 with n_points at the maximal step.
TimeGrid schrodinger_time_grid(const NonstaticityParams& p, const WaveConfig& cfg,
                               int n_points, double start_offset = 0.0);

/// Evaluates i hbar dPsi/dt + (hbar^2 / 2 epsilon) d2Psi/dq2 - (epsilon omega^2 q^2 / 2) Psi
/// with five-point stencils (time step = grid step). Per time the residual
/// norm is divided by the norm of H Psi; max_abs and rms summarize those ratios.
ResidualReport schrodinger_residual(const NonstaticityParams& p, const WaveConfig& cfg,
                                    const TimeGrid& t_grid, const QGrid& q_grid,
                                    const SchrodingerOptions& options = {});

struct ConvergenceReport {
  ResidualReport coarse;
  ResidualReport fine;
  /// coarse.rms / fine.rms
  double reduction = 0.0;
  bool converged = false;
};

/// Repeats the residual with both steps halved over the same span. A
/// reduction below 4 marks the grid as under-resolved, unless the coarse
/// residual is already at round-off level.
ConvergenceReport schrodinger_convergence(const NonstaticityParams& p, const WaveConfig& cfg,
                                          const TimeGrid& t_grid, const QGrid& q_grid,
                                          const SchrodingerOptions& options = {});

/// Gauge function sampled on the uniform grid t0 + j (t - t0) / (n - 1).
/// An empty alpha_dot means the derivative is taken by central differences.
struct GaugeSamples {
  std::vector<double> alpha;
  std::vector<double> alpha_dot;
};

GaugeSamples sample_gauge(const std::function<double(double)>& alpha,
                          const std::optional<std::function<double(double)>>& alpha_dot,
                          double t0, double t, int n_intervals);

/// Geometric phase arg<Psi(t0)|Psi(t)> + int <Psi|i d/dt|Psi> dt' + gamma_G(t0)
/// evaluated by grid quadrature for Psi and for exp(i alpha) Psi. Returns the
/// two values; gauge invariance means they agree modulo 2 pi.
std::pair<double, double> gauge_invariance_check(const NonstaticityParams& p,
                                                 const WaveConfig& cfg,
                                                 const GaugeSamples& alpha, double t,
                                                 const QGrid& q_grid, int jobs = 1);

/// Samples the Gamma_D integrand (and A0 from Q0 when configured) on
/// n_samples times over [t0, t0 + 3 pi / omega]; reports the largest deviation
/// from the t0 value, relative to it when it is nonzero.
ResidualReport constancy_audit(const NonstaticityParams& p, const WaveConfig& cfg,
                               int n_samples, double tolerance = 1e-9);

/// Truncation order ceil(A0^2 + 10 A0 + 20) for the Fock expansion check.
int expansion_order(double a0);

/// One line of a verification report.
struct CheckRecord {
  std::string name;
  std::map<std::string, double> params;
  double metric = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteOptions {
  int jobs = 1;
  bool grid_checks = true;
  std::string prefix;
};

/// Runs every oracle and property check for one configuration.
std::vector<CheckRecord> run_verification_suite(const NonstaticityParams& p,
                                                const WaveConfig& cfg,
                                                const SuiteOptions& options = {});

struct RandomCase {
  NonstaticityParams params;
  WaveConfig config;
};

/// Reproducible draws from a 64-bit Mersenne twister seeded with `seed`.
/// Analytic cases span nonstaticity D in [0, 15]; grid cases keep D <= 2,
/// A0 <= 1.5 and give A0 directly so the q-grids stay small.
std::vector<RandomCase> random_cases(std::uint64_t seed, int count, bool grid_cases);

/// Sorts by name and serializes to JSON (one object per check).
std::string report_json(std::vector<CheckRecord> records);

}  // namespace geophase
