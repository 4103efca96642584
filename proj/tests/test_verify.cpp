#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <random>

#include "geophase/phase_engine.hpp"
#include "geophase/timefunc.hpp"
#include "geophase/verify.hpp"
#include "oracles.hpp"

using namespace geophase;
using std::numbers::pi;

namespace {

WaveConfig with_a0(double a0, double theta = 0.0) {
  WaveConfig cfg;
  cfg.amplitude = EigenvalueAmplitude{a0};
  cfg.theta = theta;
  return cfg;
}

TimeGrid period_grid(const NonstaticityParams& p, const WaveConfig& cfg) {
  const double h = max_schrodinger_time_step(p, cfg);
  return schrodinger_time_grid(p, cfg, static_cast<int>(std::ceil(pi / cfg.omega / h)) + 1);
}

}  // namespace

TEST_CASE("adaptive quadrature on known integrals") {
  CHECK(adaptive_integrate([](double x) { return std::sin(x); }, 0.0, pi).value ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(adaptive_integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  // a sharp Lorentzian, with and without a breakpoint at its centre
  auto peak = [](double x) { return 1e-3 / (x * x + 1e-6); };
  const double exact = 2.0 * std::atan(1e3);
  const double centre = 0.0;
  CHECK(std::abs(adaptive_integrate(peak, -1.0, 1.0).value - exact) <= 1e-10);
  CHECK(std::abs(adaptive_integrate(peak, -1.0, 1.0, {&centre, 1}).value - exact) <= 1e-10);
  // reversed limits
  CHECK(adaptive_integrate([](double x) { return x; }, 1.0, 0.0).value == doctest::Approx(-0.5));
  CHECK(adaptive_integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("non-convergence is reported, never truncated") {
  CHECK_THROWS_AS(
      adaptive_integrate([](double x) { return std::sin(400.0 * x); }, 0.0, 10.0, {}, 1e-11, 4),
      QuadratureError);
  CHECK_THROWS_AS(adaptive_integrate([](double x) { return 1.0 / x; }, 0.0, 1.0), QuadratureError);
}

TEST_CASE("halving the tolerance moves the result by less than the error estimate") {
  const auto p = make_params(5.0, 0.22, Branch::plus, 0.3);
  const TimeFunction tf(p, WaveConfig{});
  auto g = [&](double s) { return 1.0 / tf(s).f; };
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const auto a = adaptive_integrate(g, 0.0, 7.0, {}, tol);
    const auto b = adaptive_integrate(g, 0.0, 7.0, {}, tol / 2);
    CHECK(std::abs(a.value - b.value) <= a.error_estimate);
  }
}

TEST_CASE("quad_T") {
  const WaveConfig cfg;
  CHECK(quad_T(make_params(1, 1), cfg, 2.0).value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(quad_T(make_params(2.5, 0.5), cfg, pi).value - pi) <= 1e-10);
  CHECK_THROWS_AS(quad_T(make_params(1, 1), cfg, -1.0), DomainError);
  // independent Simpson oracle
  const auto p = make_params(3.5, 0.5, Branch::minus, -0.7);
  const oracle::Wave w{p.c1(), p.c2(), p.c3(), p.phi(), 1.0, 0.0};
  const double ref = oracle::simpson([&](double s) { return 1.0 / oracle::f(w, s); }, 0.0, 5.0, 1e-13, 256);
  CHECK(std::abs(quad_T(p, cfg, 5.0).value - ref) <= 1e-10);
}

TEST_CASE("quad_gamma_g and quad_gamma_d") {
  CHECK(std::abs(quad_gamma_g(make_params(1, 1), with_a0(0.1), 1.0).value - 0.01) <= 1e-10);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const auto d = oracle::draw_wave(rng, 15.0);
    const auto p = make_params(d.c1, d.c2, d.minus ? Branch::minus : Branch::plus, d.phi);
    auto cfg = with_a0(2.0 * unit(rng), 2.0 * pi * unit(rng));
    cfg.omega = 0.5 + unit(rng);
    const double t = 3.0 * pi / cfg.omega * unit(rng);
    const double qg = quad_gamma_g(p, cfg, t).value;
    const double qd = quad_gamma_d(p, cfg, t).value;
    CHECK(std::abs(qd - gamma_d_rate(p, cfg) * t) <= 1e-9);
    CHECK(std::abs(qg + qd + 0.5 * cfg.omega * quad_T(p, cfg, t).value) <= 1e-9);
    CHECK(std::abs(qg - gamma_g(p, cfg, t)) <= 1e-8);
  }
}

TEST_CASE("Schrodinger residual") {
  SchrodingerOptions opts;
  opts.jobs = 4;
  const auto s = make_params(1, 1);
  const auto ground = with_a0(0.0);
  const auto r0 = schrodinger_residual(s, ground, period_grid(s, ground), trajectory_q_grid(s, ground), opts);
  CHECK(r0.rms <= 1e-6);
  CHECK(r0.pass);
  CHECK(r0.name == "schrodinger_residual");
  CHECK(r0.max_abs >= r0.rms);
  CHECK(r0.grid_meta.find("nq=") != std::string::npos);

  const auto p = make_params(2.5, 0.5);
  const auto cfg = with_a0(0.1);
  const auto tg = period_grid(p, cfg);
  const auto qg = trajectory_q_grid(p, cfg);
  const auto conv = schrodinger_convergence(p, cfg, tg, qg, opts);
  CHECK(conv.coarse.rms <= 1e-5);
  CHECK(conv.reduction >= 4.0);
  CHECK(conv.converged);

  opts.phase = PhaseFactor::eigenfunction_only;
  const auto bare = schrodinger_residual(p, cfg, tg, qg, opts);
  CHECK(bare.rms >= 100.0 * conv.coarse.rms);
  CHECK_FALSE(bare.pass);
  CHECK(bare.name == "schrodinger_residual_no_phase");

  opts.phase = PhaseFactor::dynamical_only;
  const auto no_geometric = schrodinger_residual(p, cfg, tg, qg, opts);
  CHECK(no_geometric.rms >= 100.0 * conv.coarse.rms);
  CHECK(no_geometric.name == "schrodinger_residual_no_geometric");
}

TEST_CASE("Schrodinger residual preconditions") {
  const auto p = make_params(2.5, 0.5);
  const auto cfg = with_a0(0.1);
  const auto qg = trajectory_q_grid(p, cfg);
  const double h = max_schrodinger_time_step(p, cfg);
  CHECK(h == doctest::Approx(2.0 * pi / (200.0 * 2.5)));
  CHECK_THROWS_AS(schrodinger_residual(p, cfg, TimeGrid{1.0, 1.0 + 10.0 * h, 6}, qg), ParameterError);
  CHECK_THROWS_AS(schrodinger_residual(p, cfg, TimeGrid{h, 5.0 * h, 5}, qg), DomainError);
  CHECK_THROWS_AS(schrodinger_residual(p, cfg, TimeGrid{1.0, 1.0, 1}, qg), ParameterError);
}

TEST_CASE("under-resolved q-grid is diagnosed") {
  const auto p = make_params(2.5, 0.5);
  const auto cfg = with_a0(1.0);
  const auto coarse_q = QGrid{-10.0, 10.0, 61};
  const auto conv = schrodinger_convergence(p, cfg, schrodinger_time_grid(p, cfg, 8), coarse_q);
  CHECK_FALSE(conv.coarse.pass);
  if (!conv.converged) CHECK(conv.coarse.diagnostic.find("under-resolved") != std::string::npos);
}

TEST_CASE("gauge invariance") {
  auto three_t = [](double s) { return 3.0 * s; };
  auto sine = [](double s) { return std::sin(2.0 * s); };
  {
    const auto s = make_params(1, 1);
    const auto cfg = with_a0(0.0);
    const auto alpha = sample_gauge(three_t, std::function<double(double)>([](double) { return 3.0; }),
                                    0.0, 1.7, 200);
    const auto [a, b] = gauge_invariance_check(s, cfg, alpha, 1.7, trajectory_q_grid(s, cfg));
    CHECK(std::abs(wrap_phase(a - b)) <= 1e-6);
    // the ground state has no overlap phase, so the formula returns gamma_G itself
    CHECK(std::abs(a - gamma_g(s, cfg, 1.7)) <= 1e-6);
  }
  {
    // static packet after half a period: A(t) = -A0, a real overlap
    const auto s = make_params(1, 1);
    const auto cfg = with_a0(0.6);
    const auto zero = sample_gauge([](double) { return 0.0; }, std::nullopt, 0.0, pi, 200);
    const auto [a, b] = gauge_invariance_check(s, cfg, zero, pi, trajectory_q_grid(s, cfg), 4);
    CHECK(std::abs(a - b) <= 1e-12);
    CHECK(std::abs(a - gamma_g(s, cfg, pi)) <= 1e-6);
    CHECK(gamma_g(s, cfg, pi) == doctest::Approx(0.36 * pi));
  }
  {
    const auto p = make_params(2.5, 0.5);
    auto cfg = with_a0(0.7, 0.3);
    cfg.gamma_g0 = 0.2;
    const double t = 1.3;
    const auto grid = trajectory_q_grid(p, cfg);
    const auto alpha = sample_gauge(sine, std::nullopt, 0.0, t, 200);
    const auto [a, b] = gauge_invariance_check(p, cfg, alpha, t, grid, 4);
    CHECK(std::abs(wrap_phase(a - b)) <= 1e-6);
    // in general the formula adds the overlap phase of the eigenstates
    const auto first = sample_coherent(p, cfg, grid, 0.0, PhaseFactor::eigenfunction_only);
    const auto last = sample_coherent(p, cfg, grid, t, PhaseFactor::eigenfunction_only);
    const double overlap_phase = std::arg(inner_product(first, last));
    CHECK(std::abs(wrap_phase(a - gamma_g(p, cfg, t) - overlap_phase)) <= 1e-6);
  }
  CHECK_THROWS_AS(sample_gauge(sine, std::nullopt, 0.0, 1.0, 7), ParameterError);
  CHECK_THROWS_AS(sample_gauge(sine, std::nullopt, 1.0, 1.0, 8), DomainError);
}

TEST_CASE("constancy audit") {
  WaveConfig cfg;
  cfg.amplitude = QuadratureAmplitude{1.0};
  const auto s = constancy_audit(make_params(1, 1), cfg, 100);
  CHECK(s.max_abs <= 1e-13);
  CHECK(s.pass);
  const auto mid = constancy_audit(make_params(2.5, 0.5), cfg, 500);
  CHECK(mid.max_abs <= 1e-10);
  CHECK(mid.grid_meta.find("A0") != std::string::npos);
  cfg.theta0 = pi / 3;
  const auto extreme = constancy_audit(make_params(20, 20, Branch::plus, pi / 8), cfg, 1000);
  CHECK(extreme.max_abs <= 1e-9);
  CHECK(extreme.pass == (extreme.max_abs <= extreme.tolerance_used));
  CHECK_THROWS_AS(constancy_audit(make_params(1, 1), cfg, 1), ParameterError);
}

TEST_CASE("verification suite and report") {
  const auto p = make_params(2.5, 0.5, Branch::plus, 0.2);
  const auto cfg = with_a0(0.5, 0.4);
  const auto records = run_verification_suite(p, cfg, {.jobs = 4});
  REQUIRE(records.size() >= 12);
  for (const auto& r : records) {
    INFO(r.name << " metric " << r.metric);
    CHECK(r.pass);
    CHECK(r.params.count("c1") == 1);
  }
  const auto doc = nlohmann::json::parse(report_json(records));
  CHECK(doc["failed"] == 0);
  const auto& checks = doc["checks"];
  for (std::size_t i = 1; i < checks.size(); ++i) {
    CHECK(checks[i - 1]["name"].get<std::string>() <= checks[i]["name"].get<std::string>());
  }
  for (const auto& c : checks) {
    CHECK(c.contains("name"));
    CHECK(c.contains("params"));
    CHECK(c.contains("metric"));
    CHECK(c.contains("tolerance"));
    CHECK(c.contains("pass"));
  }
  CHECK(report_json(records) == report_json(run_verification_suite(p, cfg, {.jobs = 2})));
}

TEST_CASE("perturbed auxiliary equation fails the Schrodinger check") {
  const auto p = make_params(2.5, 0.5);
  auto cfg = with_a0(0.1);
  cfg.fddot_scale = 1.01;
  const auto records = run_verification_suite(p, cfg, {.jobs = 4});
  bool residual_failed = false;
  bool ode_failed = false;
  for (const auto& r : records) {
    if (r.name == "schrodinger_residual") residual_failed = !r.pass;
    if (r.name == "ode_residual") ode_failed = !r.pass;
  }
  CHECK(residual_failed);
  CHECK(ode_failed);
}

TEST_CASE("random cases are reproducible and admissible") {
  const auto a = random_cases(42, 30, false);
  const auto b = random_cases(42, 30, false);
  REQUIRE(a.size() == 30);
  double d_max = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].params.c1() == b[i].params.c1());
    CHECK(a[i].config.theta == b[i].config.theta);
    CHECK(a[i].params.c1() * a[i].params.c2() >= 1.0);
    d_max = std::max(d_max, nonstaticity_measure(a[i].params).d);
  }
  CHECK(d_max <= 15.0);
  CHECK(d_max > 5.0);
  for (const auto& c : random_cases(3, 20, true)) {
    CHECK(nonstaticity_measure(c.params).d <= 2.0 + 1e-12);
    CHECK_FALSE(c.config.amplitude_is_quadrature());
  }
  CHECK(random_cases(1, 5, false)[0].params.c1() != random_cases(2, 5, false)[0].params.c1());
}
