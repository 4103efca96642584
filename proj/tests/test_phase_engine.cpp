#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geophase/phase_engine.hpp"
#include "geophase/timefunc.hpp"
#include "oracles.hpp"

using namespace geophase;
using std::numbers::pi;

namespace {

WaveConfig with_a0(double a0) {
  WaveConfig cfg;
  cfg.amplitude = EigenvalueAmplitude{a0};
  return cfg;
}

double simpson_T(const NonstaticityParams& p, const WaveConfig& cfg, double t) {
  const oracle::Wave w{p.c1(), p.c2(), p.c3(), p.phi(), cfg.omega, cfg.t0};
  return oracle::simpson([&](double s) { return 1.0 / oracle::f(w, s); }, cfg.t0, t, 1e-13, 256);
}

NonstaticityParams random_params(std::mt19937_64& rng, double d_max) {
  const auto d = oracle::draw_wave(rng, d_max);
  return make_params(d.c1, d.c2, d.minus ? Branch::minus : Branch::plus, d.phi);
}

}  // namespace

TEST_CASE("phase time of the static wave is elapsed time") {
  WaveConfig cfg;
  cfg.t0 = 0.25;
  for (double t : {0.25, 1.0, 2.25, 40.0}) {
    CHECK(phase_time_T(make_params(1, 1), cfg, t) == t - 0.25);
  }
}

TEST_CASE("phase time against the Simpson oracle") {
  const auto p = make_params(2.5, 0.5);
  const WaveConfig cfg;
  CHECK(std::abs(phase_time_T(p, cfg, pi) - pi) <= 1e-9);
  CHECK(std::abs(phase_time_T(p, cfg, 0.5) - simpson_T(p, cfg, 0.5)) <= 1e-9);
  CHECK(phase_time_T(p, cfg, 0.0) == 0.0);
  CHECK_THROWS_AS(phase_time_T(p, cfg, -0.1), DomainError);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> when(0.0, 3.0 * pi);
  for (int i = 0; i < 60; ++i) {
    const auto q = random_params(rng, 6.0);
    const double t = when(rng);
    CHECK(std::abs(phase_time_T(q, cfg, t) - simpson_T(q, cfg, t)) <= 1e-9);
  }
}

TEST_CASE("phase time is continuous and increasing across branch points") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng, 15.0);
    WaveConfig cfg;
    cfg.omega = 1.3;
    cfg.t0 = 0.2;
    const TimeFunction tf(p, cfg);
    double previous = -1.0;
    for (int k = 0; k <= 5000; ++k) {
      const double t = cfg.t0 + 3.0 * pi / cfg.omega * k / 5000.0;
      const double T = tf.phase_time(t);
      CHECK(T > previous);
      previous = T;
    }
    auto specials = tf.branch_times(cfg.t0, cfg.t0 + 3.0 * pi / cfg.omega);
    const auto nodes = tf.node_times(cfg.t0, cfg.t0 + 3.0 * pi / cfg.omega);
    specials.insert(specials.end(), nodes.begin(), nodes.end());
    for (double s : specials) {
      if (s - 1e-11 < cfg.t0) continue;
      const double jump = tf.phase_time(s + 1e-11) - tf.phase_time(s - 1e-11);
      CHECK(std::abs(jump) <= 1e-9);
    }
  }
}

TEST_CASE("eigenvalue modulus from the classical amplitude") {
  WaveConfig cfg;
  cfg.amplitude = QuadratureAmplitude{1.0};
  CHECK(amplitude_a0(make_params(1, 1), cfg, 0.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  cfg.amplitude = QuadratureAmplitude{0.0};
  CHECK(amplitude_a0(make_params(2.5, 0.5), cfg, 0.3) == 0.0);
  cfg.amplitude = QuadratureAmplitude{1.0};
  const auto p = make_params(2.5, 0.5);
  CHECK(std::abs(amplitude_a0(p, cfg, 0.0) - amplitude_a0(p, cfg, 0.9)) <= 1e-9);
  CHECK_THROWS_AS(amplitude_a0(p, with_a0(0.1), 0.0), ParameterError);
  CHECK(resolved_a0(p, with_a0(0.3)) == 0.3);
}

TEST_CASE("eigenvalue A(t)") {
  auto cfg = with_a0(0.7);
  cfg.theta = 0.4;
  const auto at_start = eigenvalue_A(make_params(2.5, 0.5), cfg, 0.0);
  CHECK(at_start.accumulated_phase == doctest::Approx(0.4));
  CHECK(std::abs(at_start.value() - std::polar(0.7, -0.4)) <= 1e-15);
  cfg.theta = 0.0;
  CHECK(std::abs(eigenvalue_A(make_params(1, 1), cfg, pi).value() - (-0.7)) <= 1e-15);
  CHECK(std::abs(eigenvalue_A(make_params(2.5, 0.5), cfg, pi).value() - (-0.7)) <= 1e-9);
}

TEST_CASE("g-functions") {
  const auto g = g_functions(make_params(1, 1), with_a0(0.0), 1.3);
  CHECK(g.g1 == -1.0);
  CHECK(g.g2 == 0.0);
  CHECK(g.g3 == 0.0);
  CHECK(g.g4 == 1.0);
  CHECK(g.g1_bar == 1.0);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const auto p = random_params(rng, 15.0);
    auto cfg = with_a0(2.0 * unit(rng));
    cfg.theta = 2.0 * pi * unit(rng);
    const double t = 10.0 * unit(rng);
    const auto a = g_functions(p, cfg, t);
    const auto b = g_functions_from_eigenvalue(p, cfg, t);
    const double f = eval_f(p, cfg, t).f;
    auto close = [](double x, double y) {
      return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
    };
    CHECK(close(a.g1, b.g1));
    CHECK(close(a.g2, b.g2));
    CHECK(close(a.g3, b.g3));
    CHECK(close(a.g4, b.g4));
    CHECK(close(a.g1_bar, b.g1_bar));
    CHECK((a.g1_bar - a.g1) * f == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("dynamical rate") {
  CHECK(gamma_d_rate(make_params(1, 1), with_a0(0.1)) == doctest::Approx(-0.51).epsilon(1e-14));
  CHECK(gamma_d_rate(make_params(2.5, 0.5), with_a0(0.1)) ==
        doctest::Approx(oracle::dynamical_rate_at_zero_angles(2.5, 0.5, 0.1, 1.0)).epsilon(1e-14));
  CHECK(gamma_d_rate(make_params(2.5, 0.5), with_a0(0.1)) == doctest::Approx(-0.76).epsilon(1e-14));
  CHECK(gamma_d_rate(make_params(20, 20), with_a0(1.0)) == doctest::Approx(-49.95).epsilon(1e-14));
  // within 0.2% of -omega (2 A0^2 + 1/2) c1
  CHECK(std::abs(gamma_d_rate(make_params(20, 20), with_a0(1.0)) / -50.0 - 1.0) <= 0.002);

  // time average of the integrand over one period
  const auto p = make_params(2.5, 0.5, Branch::plus, 0.3);
  auto cfg = with_a0(0.8);
  cfg.theta = 1.1;
  const double mean =
      oracle::simpson([&](double s) { return gamma_d_integrand(p, cfg, s); }, 0.0, pi) / pi;
  CHECK(mean == doctest::Approx(gamma_d_rate(p, cfg)).epsilon(1e-10));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto q = random_params(rng, 15.0);
    auto c = with_a0(2.0 * unit(rng));
    c.theta = 2.0 * pi * unit(rng);
    c.omega = 0.5 + unit(rng);
    const double rate = gamma_d_rate(q, c);
    double spread = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double t = 3.0 * pi / c.omega * k / 999.0;
      const double x = gamma_d_integrand(q, c, t);
      CHECK(std::abs(x - rate) <= 1e-10 * std::max(1.0, std::abs(rate)));
      spread += (x - rate) * (x - rate);
    }
    CHECK(std::sqrt(spread / 1000.0) <= 1e-10 * std::max(1.0, std::abs(rate)));
  }
}

TEST_CASE("rate identity") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng, 15.0);
    auto cfg = with_a0(2.0 * unit(rng));
    cfg.theta = 2.0 * pi * unit(rng);
    const double rate = gamma_d_rate(p, cfg);
    for (int k = 0; k < 200; ++k) {
      const double t = 3.0 * pi * k / 199.0;
      const double lhs = gamma_g_rate(p, cfg, t) + rate;
      CHECK(std::abs(lhs + 0.5 / eval_f(p, cfg, t).f) <= 1e-10 * std::max(1.0, std::abs(rate)));
    }
  }
}

TEST_CASE("geometric phase closed form") {
  auto cfg = with_a0(0.1);
  CHECK(gamma_g(make_params(1, 1), cfg, 1.0) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(std::abs(gamma_g(make_params(1, 1), with_a0(0.0), 3.7)) <= 1e-15);
  const auto p = make_params(2.5, 0.5);
  CHECK(gamma_g(p, with_a0(0.0), 1.0) ==
        doctest::Approx(-simpson_T(p, cfg, 1.0) / 2.0 + 0.75).epsilon(1e-10));
  // Simpson of an independently assembled geometric rate
  auto c = with_a0(0.9);
  c.theta = 0.6;
  const auto q = make_params(3.0, 0.5, Branch::minus, 0.2);
  const oracle::Wave w{q.c1(), q.c2(), q.c3(), q.phi(), 1.0, 0.0};
  const double rate_d = gamma_d_rate(q, c);
  const double integral = oracle::simpson(
      [&](double s) { return -0.5 / oracle::f(w, s) - rate_d; }, 0.0, 2.0 * pi, 1e-13, 256);
  CHECK(std::abs(gamma_g(q, c, 2.0 * pi) - integral) <= 1e-8);
}

TEST_CASE("static geometric phase grows as omega A0^2 t") {
  for (double a0 : {0.0, 0.1, 1.0, 1.7}) {
    auto cfg = with_a0(a0);
    cfg.omega = 1.4;
    cfg.theta = 0.8;
    cfg.gamma_g0 = 0.25;
    for (double t : {0.0, 0.5, 3.0, 12.0}) {
      const double grown = gamma_g(make_params(1, 1), cfg, t) - cfg.gamma_g0;
      CHECK(std::abs(grown - cfg.omega * a0 * a0 * t) <= 1e-12 * std::max(1.0, t));
    }
  }
}

TEST_CASE("dynamical phase") {
  CHECK(gamma_d(make_params(1, 1), with_a0(0.1), 1.0) == doctest::Approx(-0.51));
  auto cfg = with_a0(0.3);
  cfg.gamma_d0 = 0.7;
  CHECK(gamma_d(make_params(2.5, 0.5), cfg, 0.0) == 0.7);
  CHECK(gamma_d(make_params(20, 20), with_a0(1.0), 1.0) == doctest::Approx(-49.95));
}

TEST_CASE("total phase and its decomposition") {
  const auto s = gamma_total(make_params(1, 1), with_a0(0.1), 1.0);
  CHECK(s.gamma_total == doctest::Approx(-0.5));
  CHECK(s.gamma_nl == 0.0);
  CHECK(std::abs(gamma_total(make_params(2.5, 0.5), with_a0(0.1), pi).gamma_total + pi / 2) <= 1e-9);

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_params(rng, 15.0);
    auto cfg = with_a0(2.0 * unit(rng));
    cfg.theta = 2.0 * pi * unit(rng);
    cfg.gamma_g0 = unit(rng) - 0.5;
    cfg.gamma_d0 = unit(rng) - 0.5;
    const double t = 10.0 * unit(rng);
    const auto x = gamma_total(p, cfg, t);
    const double scale = std::max(1.0, std::abs(x.gamma_d));
    CHECK(std::abs(x.gamma_total - (x.gamma_g + x.gamma_d)) <= 1e-10 * scale);
    CHECK(std::abs(x.gamma_g - (x.gamma_nl + x.gamma_l)) <= 1e-10 * scale);
    CHECK(std::abs(x.gamma_g - gamma_g(p, cfg, t)) <= 1e-10 * scale);
    CHECK(std::abs(x.gamma_d - gamma_d(p, cfg, t)) <= 1e-10 * scale);
    // independent of A0 and theta
    for (double a0 : {0.0, 1.0, 2.0}) {
      auto other = cfg;
      other.amplitude = EigenvalueAmplitude{a0};
      other.theta = 0.0;
      CHECK(std::abs(gamma_total(p, other, t).gamma_total - x.gamma_total) <= 1e-10);
    }
  }
}

TEST_CASE("phases are invariant under phi -> phi + pi") {
  auto cfg = with_a0(0.6);
  cfg.theta = 0.3;
  const auto a = make_params(3.0, 0.5, Branch::plus, 0.4);
  const auto b = make_params(3.0, 0.5, Branch::plus, 0.4 + pi);
  const auto c = make_params(3.0, 0.5, Branch::plus, 0.4 - 3.0 * pi);
  for (double t : {0.0, 1.0, 5.5}) {
    CHECK(gamma_g(a, cfg, t) == doctest::Approx(gamma_g(b, cfg, t)).epsilon(1e-12));
    CHECK(gamma_g(a, cfg, t) == doctest::Approx(gamma_g(c, cfg, t)).epsilon(1e-12));
    CHECK(gamma_d(a, cfg, t) == doctest::Approx(gamma_d(b, cfg, t)).epsilon(1e-12));
    CHECK(gamma_total(a, cfg, t).gamma_total ==
          doctest::Approx(gamma_total(b, cfg, t).gamma_total).epsilon(1e-12));
  }
}

TEST_CASE("Fock phases") {
  const WaveConfig cfg;
  for (int n : {0, 1, 2, 5}) {
    for (double t : {0.0, 0.7, 4.0}) {
      CHECK(std::abs(fock_phases(make_params(1, 1), cfg, n, t).gamma_g) <= 1e-15);
    }
  }
  CHECK(fock_phases(make_params(1, 1), cfg, 0, 1.0).gamma_d == doctest::Approx(-0.5));
  CHECK_THROWS_AS(fock_phases(make_params(1, 1), cfg, -1, 1.0), ParameterError);

  // n = 0 coincides with the coherent state of zero amplitude at phi = theta = 0
  for (auto [c1, c2] : {std::pair{2.5, 0.5}, {5.0, 0.278}, {20.0, 20.0}}) {
    const auto p = make_params(c1, c2);
    for (int k = 0; k <= 100; ++k) {
      const double t = 0.1 * k;
      const double coherent = gamma_g(p, with_a0(0.0), t);
      CHECK(std::abs(coherent - fock_phases(p, cfg, 0, t).gamma_g) <= 1e-10 * std::max(1.0, std::abs(coherent)));
    }
  }

  // Fock decomposition obeys the same sums
  const auto p = make_params(5.0, 0.22, Branch::plus, 0.1);
  for (int n : {0, 1, 2}) {
    const auto s = fock_phases(p, cfg, n, 2.3);
    CHECK(s.gamma_total == doctest::Approx(s.gamma_g + s.gamma_d).epsilon(1e-12));
    CHECK(s.gamma_g == doctest::Approx(s.gamma_nl + s.gamma_l).epsilon(1e-12));
    CHECK(s.gamma_total == doctest::Approx(-(n + 0.5) * phase_time_T(p, cfg, 2.3)).epsilon(1e-12));
  }
}

TEST_CASE("mean-slope matching between coherent and Fock geometric phases") {
  // A0^2 = 1 against n = 1 at c1 = 5: equal average slopes where c2^2 + 7 c2 - 2 = 0
  const auto cfg = with_a0(1.0);
  auto gap = [&](double c2) {
    const auto p = make_params(5.0, c2);
    return mean_geometric_slope(p, cfg) - fock_mean_geometric_slope(p, cfg, 1);
  };
  double lo = 0.2;
  double hi = 0.35;
  REQUIRE(gap(lo) * gap(hi) < 0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(lo) * gap(mid) <= 0.0 ? hi : lo) = mid;
  }
  const double root = 0.5 * (lo + hi);
  CHECK(root == doctest::Approx((-7.0 + std::sqrt(57.0)) / 2.0).epsilon(1e-12));
  CHECK(std::abs(root - 0.275) < 0.001);

  // the slope is what the trajectories show over many periods
  const auto p = make_params(5.0, 0.278);
  const double span = 200.0 * pi;
  const double measured = (gamma_g(p, cfg, span) - gamma_g(p, cfg, 0.0)) / span;
  CHECK(measured == doctest::Approx(mean_geometric_slope(p, cfg)).epsilon(1e-12));
}

TEST_CASE("phase trajectory matches pointwise evaluation in parallel") {
  const auto p = make_params(5.0, 0.5, Branch::minus, -0.3);
  const auto cfg = with_a0(1.2);
  std::vector<double> times;
  for (int k = 0; k < 257; ++k) times.push_back(0.05 * k);
  const auto serial = phase_trajectory(p, cfg, times, 1);
  const auto threaded = phase_trajectory(p, cfg, times, 8);
  REQUIRE(serial.size() == times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(serial[k].gamma_total == threaded[k].gamma_total);
    CHECK(serial[k].gamma_g == doctest::Approx(gamma_g(p, cfg, times[k])).epsilon(1e-13));
  }
  std::vector<double> bad{1.0, -1.0};
  CHECK_THROWS_AS(phase_trajectory(p, cfg, bad, 4), DomainError);
}

TEST_CASE("wrap_phase reduces to (-pi, pi]") {
  CHECK(wrap_phase(pi) == doctest::Approx(pi));
  CHECK(wrap_phase(-pi) == doctest::Approx(pi));
  CHECK(wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_phase(0.3 + 8 * pi) == doctest::Approx(0.3));
}
