#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geophase/timefunc.hpp"
#include "oracles.hpp"

using namespace geophase;
using std::numbers::pi;

namespace {

oracle::Wave as_wave(const NonstaticityParams& p, const WaveConfig& cfg) {
  return {p.c1(), p.c2(), p.c3(), p.phi(), cfg.omega, cfg.t0};
}

}  // namespace

TEST_CASE("static time function is identically one") {
  const auto p = make_params(1, 1);
  const WaveConfig cfg;
  for (double t : {0.0, 0.3, 3.0, 17.5}) {
    const auto v = eval_f(p, cfg, t);
    CHECK(std::abs(v.f - 1.0) <= 1e-15);
    CHECK(v.f_dot == 0.0);
    CHECK(v.f_ddot == 0.0);
  }
  CHECK(std::abs(ode_residual(p, cfg, 3.0)) <= 1e-14);
}

TEST_CASE("f at quarter periods selects c1 and c2") {
  const auto p = make_params(2.5, 0.5);
  WaveConfig cfg;
  cfg.t0 = 0.4;
  CHECK(eval_f(p, cfg, 0.4).f == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(eval_f(p, cfg, 0.4 + pi / 2).f == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("t before t0 is rejected") {
  const auto p = make_params(2.5, 0.5);
  WaveConfig cfg;
  cfg.t0 = 1.0;
  CHECK_THROWS_AS(eval_f(p, cfg, 0.999), DomainError);
  CHECK_NOTHROW(eval_f(p, cfg, 1.0));
}

TEST_CASE("ode residual vanishes") {
  const WaveConfig cfg;
  CHECK(std::abs(ode_residual(make_params(2.5, 0.5), cfg, 0.7)) <= 1e-9);
  const auto extreme = make_params(20, 20, Branch::plus, pi / 8);
  const double f = eval_f(extreme, cfg, 1.3).f;
  CHECK(std::abs(ode_residual(extreme, cfg, 1.3)) <= 1e-7);
  CHECK(std::abs(ode_residual(extreme, cfg, 1.3)) <= 1e-9 * std::max(1.0, f));

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> omega(0.2, 5.0);
  std::uniform_real_distribution<double> when(0.0, 20.0);
  for (int i = 0; i < 300; ++i) {
    const auto d = oracle::draw_wave(rng, 15.0);
    const auto p = make_params(d.c1, d.c2, d.minus ? Branch::minus : Branch::plus, d.phi);
    WaveConfig c;
    c.omega = omega(rng);
    const double t = when(rng);
    const double scale = std::max(1.0, c.omega * c.omega * eval_f(p, c, t).f);
    CHECK(std::abs(ode_residual(p, c, t)) <= 1e-9 * scale);
  }
}

TEST_CASE("closed-form derivatives agree with finite differences") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> when(0.5, 10.0);
  for (int i = 0; i < 200; ++i) {
    const auto d = oracle::draw_wave(rng, 5.0);
    const auto p = make_params(d.c1, d.c2, d.minus ? Branch::minus : Branch::plus, d.phi);
    const WaveConfig cfg;
    const auto w = as_wave(p, cfg);
    const double t = when(rng);
    const auto v = eval_f(p, cfg, t);
    auto fw = [&](double s) { return oracle::f(w, s); };
    CHECK(v.f == doctest::Approx(fw(t)).epsilon(1e-13));
    CHECK(std::abs(v.f_dot - oracle::central_difference(fw, t, 1e-5)) <= 1e-6 * std::max(1.0, d.c1 + d.c2));
    auto fdot = [&](double s) { return eval_f(p, cfg, s).f_dot; };
    CHECK(std::abs(v.f_ddot - oracle::central_difference(fdot, t, 1e-5)) <= 1e-5 * std::max(1.0, d.c1 + d.c2));
  }
}

TEST_CASE("f is positive on a dense grid and has period pi/omega") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    const auto d = oracle::draw_wave(rng, 15.0);
    const auto p = make_params(d.c1, d.c2, d.minus ? Branch::minus : Branch::plus, d.phi);
    WaveConfig cfg;
    cfg.omega = 1.7;
    const double period = pi / cfg.omega;
    const TimeFunction tf(p, cfg);
    double lowest = 1e300;
    for (int k = 0; k <= 10000; ++k) {
      const double t = period * k / 10000.0;
      const double f = tf(t).f;
      lowest = std::min(lowest, f);
      if (k % 500 == 0) {
        CHECK(tf(t + period).f == doctest::Approx(f).epsilon(1e-10));
      }
    }
    CHECK(lowest > 0.0);
    CHECK(lowest >= tf.minimum() * (1.0 - 1e-9));
    CHECK(tf.minimum() * tf.maximum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("node times are minima of f") {
  const auto p = make_params(5.0, 0.278, Branch::plus, 0.3);
  const WaveConfig cfg;
  const TimeFunction tf(p, cfg);
  const auto nodes = tf.node_times(0.0, 10.0);
  REQUIRE(nodes.size() >= 3);
  for (double t : nodes) {
    CHECK(tf(t).f == doctest::Approx(tf.minimum()).epsilon(1e-12));
    CHECK(std::abs(tf(t).f_dot) <= 1e-10 * (p.c1() + p.c2()));
    CHECK(tf(t).f_ddot > 0.0);
  }
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    CHECK(nodes[k] - nodes[k - 1] == doctest::Approx(pi).epsilon(1e-12));
  }
  CHECK(TimeFunction(make_params(1, 1), cfg).node_times(0, 10).empty());
}

TEST_CASE("classical trajectory") {
  WaveConfig cfg;
  cfg.amplitude = QuadratureAmplitude{1.0};
  CHECK(classical_trajectory(cfg, 0.0) == 1.0);
  CHECK(std::abs(classical_trajectory(cfg, pi / 2)) <= 1e-15);
  cfg.amplitude = QuadratureAmplitude{2.0};
  cfg.theta0 = pi / 2;
  CHECK(classical_trajectory(cfg, pi / 2) == doctest::Approx(-2.0));
  cfg.amplitude = EigenvalueAmplitude{0.1};
  CHECK_THROWS_AS(classical_trajectory(cfg, 0.0), ParameterError);
}

TEST_CASE("perturbation hook scales the oscillating part of f") {
  const auto p = make_params(2.5, 0.5);
  WaveConfig plain;
  WaveConfig bent;
  bent.fddot_scale = 1.01;
  for (double t : {0.1, 0.9, 2.2}) {
    const auto a = TimeFunction(p, plain)(t);
    const auto b = TimeFunction(p, bent)(t);
    CHECK(b.f_ddot == doctest::Approx(1.01 * a.f_ddot).epsilon(1e-12));
    CHECK(b.f - 1.5 == doctest::Approx(1.01 * (a.f - 1.5)).epsilon(1e-12));
  }
  // the perturbed function no longer solves the auxiliary equation
  CHECK(std::abs(ode_residual(p, bent, 0.9)) > 1e-3);
  bent.fddot_scale = 100.0;
  CHECK_THROWS_AS(TimeFunction(p, bent), ParameterError);
}
