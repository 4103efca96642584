#pragma once

#include <stdexcept>
#include <string>
#include <variant>

namespace geophase {

/// Raised when a parameter set violates one of the model invariants.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a function is evaluated outside its domain (e.g. t < t0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Sign branch of c3 = ±sqrt(c1*c2 - 1).
enum class Branch : int { plus = 1, minus = -1 };

/// Nonstaticity constants of the time function.
///
/// Only constructible through make_params(), which derives c3 from (c1, c2)
/// so that c1*c2 - c3^2 = 1 holds by construction.
class NonstaticityParams {
 public:
  /// The static wave (c1, c2, c3, phi) = (1, 1, 0, 0).
  static NonstaticityParams static_wave() noexcept { return {1.0, 1.0, 0.0, 0.0}; }

  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  double c3() const noexcept { return c3_; }
  /// Phase of the time function at t0, in [-pi/2, pi/2).
  double phi() const noexcept { return phi_; }

  double determinant() const noexcept { return c1_ * c2_ - c3_ * c3_; }
  bool is_static() const noexcept { return c1_ == 1.0 && c2_ == 1.0; }

  friend NonstaticityParams make_params(double c1, double c2, Branch sign, double phi);

 private:
  NonstaticityParams(double c1, double c2, double c3, double phi) noexcept
      : c1_(c1), c2_(c2), c3_(c3), phi_(phi) {}

  double c1_;
  double c2_;
  double c3_;
  double phi_;
};

/// Validates (c1, c2), derives c3 on the requested branch and reduces phi mod pi.
/// Throws ParameterError for c1 <= 0, c2 <= 0 or c1*c2 < 1.
NonstaticityParams make_params(double c1, double c2, Branch sign = Branch::plus,
                               double phi = 0.0);

/// Reduces an angle into [-pi/2, pi/2) by adding integer multiples of pi.
double normalize_half_pi(double angle) noexcept;

/// Quadrature amplitude Q0 of the classical solution; A0 follows from it.
struct QuadratureAmplitude {
  double q0 = 1.0;
};

/// Modulus A0 of the eigenvalue A(t), given directly.
struct EigenvalueAmplitude {
  double a0 = 0.1;
};

using AmplitudeSpec = std::variant<QuadratureAmplitude, EigenvalueAmplitude>;

/// Medium and wave constants. Defaults are natural units with t0 = 0.
struct WaveConfig {
  double epsilon = 1.0;
  double mu = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  double t0 = 0.0;
  AmplitudeSpec amplitude = EigenvalueAmplitude{};
  /// Phase of A(t) at t0.
  double theta = 0.0;
  /// Phase of the classical trajectory at t0.
  double theta0 = 0.0;
  /// Initial geometric and dynamical phases.
  double gamma_g0 = 0.0;
  double gamma_d0 = 0.0;
  /// Test hook: scales the oscillating part of f(t) so that f_ddot is
  /// multiplied by this factor, deliberately breaking the auxiliary ODE.
  double fddot_scale = 1.0;

  bool amplitude_is_quadrature() const noexcept {
    return std::holds_alternative<QuadratureAmplitude>(amplitude);
  }

  /// Throws ParameterError when a constant is out of range.
  void validate() const;
};

struct NonstaticityMeasure {
  double d = 0.0;
};

/// D = sqrt((c1 + c2)^2 - 4) / (2 sqrt 2); zero only for the static wave.
NonstaticityMeasure nonstaticity_measure(const NonstaticityParams& p) noexcept;

/// omega = k c with c = 1 / sqrt(epsilon mu).
double omega_from_medium(double k, double epsilon, double mu);

}  // namespace geophase
