#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "geophase/params.hpp"

namespace geophase {

inline constexpr int kDefaultHermiteMax = 60;
inline constexpr int kDefaultGridPoints = 4096;

/// Uniform grid over [q_min, q_max] with n_points samples (endpoints included).
struct QGrid {
  double q_min = -1.0;
  double q_max = 1.0;
  int n_points = 2;

  double step() const noexcept { return (q_max - q_min) / (n_points - 1); }
  double at(int i) const noexcept { return q_min + i * step(); }
  /// Throws ParameterError for n_points < 2 or an empty range.
  void validate() const;
};

/// Wavefunction samples on a grid at time t.
struct FieldGrid {
  QGrid grid;
  double t = 0.0;
  std::vector<std::complex<double>> values;
};

struct ZetaValue {
  double zeta = 1.0;
};

/// Physicists' Hermite polynomial by the three-term recurrence.
/// Throws ParameterError for n < 0 or n > n_max.
double hermite(int n, double x, int n_max = kDefaultHermiteMax);

/// zeta(t) = epsilon omega / (hbar f(t)).
ZetaValue zeta_at(const NonstaticityParams& p, const WaveConfig& cfg, double t);

std::complex<double> fock_eigenfunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                        int n, double q, double t);

/// Fock eigenfunction times exp(i gamma_n(t)).
std::complex<double> fock_wavefunction(const NonstaticityParams& p, const WaveConfig& cfg, int n,
                                       double q, double t);

/// Eigenfunction of the generalized annihilation operator with eigenvalue A(t).
std::complex<double> coherent_eigenfunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                            double q, double t);

/// Coherent eigenfunction times exp(i gamma(t)).
std::complex<double> coherent_wavefunction(const NonstaticityParams& p, const WaveConfig& cfg,
                                           double q, double t);

/// Phase multiplying the eigenstate: the full total phase, none, or only the
/// dynamical part (geometric phase left out).
enum class PhaseFactor { with_total_phase, eigenfunction_only, dynamical_only };

/// Samples the coherent state on a grid. Does not check t >= t0, so it can
/// feed finite-difference stencils that straddle t0.
FieldGrid sample_coherent(const NonstaticityParams& p, const WaveConfig& cfg, const QGrid& grid,
                          double t, PhaseFactor phase = PhaseFactor::with_total_phase);

FieldGrid sample_fock(const NonstaticityParams& p, const WaveConfig& cfg, const QGrid& grid,
                      int n, double t, PhaseFactor phase = PhaseFactor::with_total_phase);

/// Grid centred on the packet peak at t; half-width 8 sqrt(hbar f_max / (epsilon omega))
/// plus the displacement. The point count is raised above `min_points` when
/// needed to resolve the narrowest packet and its chirp.
QGrid default_q_grid(const NonstaticityParams& p, const WaveConfig& cfg, double t,
                     int min_points = kDefaultGridPoints);

/// Grid centred at q = 0 that covers the packet at every time.
QGrid trajectory_q_grid(const NonstaticityParams& p, const WaveConfig& cfg,
                        int min_points = kDefaultGridPoints);

/// Trapezoid integral of |psi|^2.
double trapezoid_norm(const FieldGrid& field);

/// Trapezoid <a|b>; both fields must share a grid.
std::complex<double> inner_product(const FieldGrid& a, const FieldGrid& b);

/// Applies the generalized annihilation operator to grid samples
/// (fourth-order central differences for d/dq; two edge points on each side are zero).
FieldGrid apply_annihilation(const NonstaticityParams& p, const WaveConfig& cfg,
                             const FieldGrid& field);

struct ExpansionCoefficients {
  /// b_n = exp(-A0^2/2) A^n / sqrt(n!) at time t.
  std::vector<std::complex<double>> b;
  /// a_n = b_n exp(-i [gamma_n(t) - gamma(t)]), expected to be time-independent.
  std::vector<std::complex<double>> a;
};

ExpansionCoefficients expansion_coefficients(const NonstaticityParams& p, const WaveConfig& cfg,
                                             int n_max, double t);

/// Closed form exp(-A0^2/2) A0^n / sqrt(n!) exp(-i[gamma_n(t0) - gamma(t0)] - i n theta).
std::vector<std::complex<double>> constant_expansion_coefficients(const NonstaticityParams& p,
                                                                  const WaveConfig& cfg,
                                                                  int n_max);

/// sum_{n <= n_max} b_n <q|Phi_n(t)> on the grid.
FieldGrid expansion_partial_sum(const NonstaticityParams& p, const WaveConfig& cfg,
                                const QGrid& grid, int n_max, double t);

/// <I> = hbar omega (A0^2 + 1/2).
double expectation_I(const NonstaticityParams& p, const WaveConfig& cfg);

/// <H> = -hbar Gamma_D.
double expectation_H(const NonstaticityParams& p, const WaveConfig& cfg);

/// <psi|H|psi> / <psi|psi> by grid quadrature with a five-point Laplacian.
double grid_expectation_H(const WaveConfig& cfg, const FieldGrid& field);

/// <psi|A^dagger A|psi> / <psi|psi> = ||A psi||^2 / ||psi||^2 on the grid.
double grid_number_expectation(const NonstaticityParams& p, const WaveConfig& cfg,
                               const FieldGrid& field);

/// Writes columns q, re, im, abs2.
void write_field_csv(std::ostream& out, const FieldGrid& field);

}  // namespace geophase
