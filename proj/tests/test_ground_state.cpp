#include <doctest.h>

#include <cmath>

#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/ground_state.hpp"

using namespace cqnls;

TEST_CASE("frequency window is (0, 3/16)") {
  CHECK_NOTHROW(Frequency(0.1));
  CHECK_NOTHROW(Frequency(0.1874));
  for (double w : {0.0, -0.1, 0.1875, 0.2, std::nan("")}) {
    try {
      Frequency f(w);
      FAIL("accepted omega = " << w);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoGroundState);
      CHECK(std::string(e.what()).find("(0, 3/16)") != std::string::npos);
    }
  }
}

TEST_CASE("potential well critical points") {
  const Frequency w(0.1);
  const auto pw = potential_well(w);
  const double a = pw.plateau;
  CHECK(0.1 - a * a + a * a * a * a == doctest::Approx(0.0).scale(1.0));
  auto G = [](double x) { return x * x * x * x / 4 - std::pow(x, 6) / 6 - 0.1 * x * x / 2; };
  CHECK(std::abs(G(pw.lower_root)) < 1e-14);
  CHECK(pw.lower_root < pw.plateau);
  CHECK(pw.plateau_split == doctest::Approx(std::sqrt(1 - 0.4)));
}

TEST_CASE("shots on either side of the ground state classify oppositely") {
  const Frequency w(0.1);
  ShootingConfig cfg;
  const auto q = solve_ground_state(w, cfg);
  cfg.max_radius = q.grid().r_max();
  // a smaller central value leaves too little energy to reach zero: rebound
  const auto low = classify_shot(shoot(w, q.plateau_offset * 1.5, cfg));
  const auto high = classify_shot(shoot(w, q.plateau_offset * 0.5, cfg));
  CHECK(low.kind != high.kind);
  CHECK(low.kind != ShotKind::Undecided);
  CHECK(high.kind != ShotKind::Undecided);
}

TEST_CASE("ground states satisfy the equation, Pohozaev and decay") {
  for (double w : {0.02, 0.05, 3.0 / 32.0, 0.13, 0.17}) {
    CAPTURE(w);
    const auto q = solve_ground_state(Frequency(w));
    const auto r = evaluate(q.field);
    CHECK(residual(q) < 1e-6);
    CHECK(std::abs(r.pohozaev) < 1e-6 * r.kinetic);
    CHECK(std::abs(q.decay_rate / std::sqrt(w) - 1.0) < 0.02);
    CHECK(std::abs(r.p4 / (4 * w * r.mass) - 1.0) < 1e-5);
    // positive and monotone
    for (std::size_t i = 1; i < q.values().size(); ++i) CHECK_FALSE(q.values()[i] > q.values()[i - 1]);
    CHECK(q.values().back() > 0.0);
    CHECK(q.amplitude < potential_well(Frequency(w)).plateau);
  }
}

TEST_CASE("profiles on different grids coincide") {
  const Frequency w(0.05);
  const auto coarse = solve_ground_state(w);
  ShootingConfig cfg;
  cfg.grid_spacing = 1.0 / 128.0;
  const auto fine = solve_ground_state(w, cfg);
  CHECK(evaluate(fine.field).mass == doctest::Approx(evaluate(coarse.field).mass).epsilon(1e-9));
  CHECK(fine.amplitude == doctest::Approx(coarse.amplitude).epsilon(1e-12));
  CHECK(residual(fine) < residual(coarse));

  const auto g = RadialGrid::with_spacing(0.01, 80.0);
  const auto other = solve_ground_state(w, {}, g);
  CHECK(other.grid() == g);
  CHECK(other.values()[99] == doctest::Approx(interpolate(coarse.grid(), coarse.values(), 1.0)).epsilon(1e-9));
}

TEST_CASE("decay fit recovers a synthetic Yukawa tail") {
  const auto g = RadialGrid::with_spacing(1.0 / 32.0, 50.0);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.5 * std::exp(-0.3 * g.node(i)) / g.node(i);
  const auto fit = fit_decay(RealRadialFunction(g, v));
  CHECK(fit.rate == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.c == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("shooting configuration is validated") {
  ShootingConfig cfg;
  cfg.grid_spacing = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.ode_rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

// [DERIVED] shooting at h = 1/64, cross-checked against the collocation oracle
TEST_CASE("regression: Q at omega = 3/32") {
  const auto q = solve_ground_state(Frequency(3.0 / 32.0));
  const auto r = evaluate(q.field);
  CHECK(r.mass == doctest::Approx(524.0407256406293).epsilon(1e-10));
  CHECK(q.amplitude == doctest::Approx(0.914048678906195).epsilon(1e-12));
  CHECK(r.energy == doctest::Approx(-11.15427158960351).epsilon(1e-9));
}
