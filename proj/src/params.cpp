#include "geophase/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace geophase {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite (got " << value << ")";
    throw ParameterError(msg.str());
  }
}

}  // namespace

double normalize_half_pi(double angle) noexcept {
  constexpr double pi = std::numbers::pi;
  double r = angle - pi * std::floor((angle + pi / 2.0) / pi);
  // floor() can land one ulp off at the interval ends
  if (r >= pi / 2.0) r -= pi;
  if (r < -pi / 2.0) r += pi;
  return r;
}

NonstaticityParams make_params(double c1, double c2, Branch sign, double phi) {
  require_positive(c1, "c1");
  require_positive(c2, "c2");
  if (sign != Branch::plus && sign != Branch::minus) {
    throw ParameterError("c3 branch must be +1 or -1");
  }
  if (!std::isfinite(phi)) throw ParameterError("phi must be finite");
  const double product = c1 * c2;
  if (product < 1.0) {
    std::ostringstream msg;
    msg << "c1*c2 < 1 (c1=" << c1 << ", c2=" << c2 << ", c1*c2=" << product << ")";
    throw ParameterError(msg.str());
  }
  const double c3 = static_cast<int>(sign) * std::sqrt(product - 1.0);
  return NonstaticityParams(c1, c2, c3, normalize_half_pi(phi));
}

void WaveConfig::validate() const {
  require_positive(epsilon, "epsilon");
  require_positive(mu, "mu");
  require_positive(omega, "omega");
  require_positive(hbar, "hbar");
  require_positive(fddot_scale, "fddot_scale");
  for (double v : {t0, theta, theta0, gamma_g0, gamma_d0}) {
    if (!std::isfinite(v)) throw ParameterError("angles, phases and t0 must be finite");
  }
  if (const auto* a = std::get_if<EigenvalueAmplitude>(&amplitude)) {
    if (!(a->a0 >= 0.0) || !std::isfinite(a->a0)) {
      throw ParameterError("A0 must be a nonnegative finite number");
    }
  } else if (!std::isfinite(std::get<QuadratureAmplitude>(amplitude).q0)) {
    throw ParameterError("Q0 must be finite");
  }
}

NonstaticityMeasure nonstaticity_measure(const NonstaticityParams& p) noexcept {
  const double s = p.c1() + p.c2();
  // s >= 2 follows from c1*c2 >= 1; clamp rounding noise at the static point
  const double radicand = std::max(0.0, s * s - 4.0);
  return {std::sqrt(radicand) / (2.0 * std::numbers::sqrt2)};
}

double omega_from_medium(double k, double epsilon, double mu) {
  require_positive(k, "k");
  require_positive(epsilon, "epsilon");
  require_positive(mu, "mu");
  return k / std::sqrt(epsilon * mu);
}

}  // namespace geophase
