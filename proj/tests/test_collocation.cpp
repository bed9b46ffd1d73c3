#include <doctest.h>

#include <cmath>

#include "cqnls/collocation.hpp"
#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"

using namespace cqnls;

TEST_CASE("collocation and shooting agree") {
  for (double w : {0.02, 3.0 / 32.0, 0.17}) {
    CAPTURE(w);
    const auto q = solve_ground_state(Frequency(w));
    const auto c = solve_collocation(Frequency(w), q.field);
    const auto r = evaluate(q.field);
    CHECK(c.iterations > 1);
    CHECK(c.residual < 1e-9);
    CHECK(std::abs(c.report.mass / r.mass - 1.0) < 1e-6);
    CHECK(std::abs(c.report.energy - r.energy) < 1e-6 * r.kinetic);
    CHECK(c.profile(0.0) == doctest::Approx(q.amplitude).epsilon(1e-7));
    CHECK(c.profile(5.0) == doctest::Approx(interpolate(q.grid(), q.values(), 5.0)).epsilon(1e-6));
  }
}

TEST_CASE("collocation converges from a crude bubble") {
  // tanh front at the plateau, no information from the shooting solver
  const double w = 0.1;
  auto bubble = [&](double front) {
    const double a = std::sqrt((1 + std::sqrt(1 - 4 * w)) / 2);
    const auto g = RadialGrid::with_spacing(1.0 / 16.0, 120.0);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * 0.5 * (1 - std::tanh((g.node(i) - front) / 1.5));
    return RealRadialFunction(g, v);
  };
  const auto c = solve_collocation(Frequency(w), bubble(6.0));
  const auto q = solve_ground_state(Frequency(w));
  CHECK(c.report.mass == doctest::Approx(evaluate(q.field).mass).epsilon(1e-6));
  // a bubble that is too small collapses to zero, which is reported
  CHECK_THROWS_AS(solve_collocation(Frequency(w), bubble(2.0)), Error);
}

TEST_CASE("collocation identities") {
  const double w = 0.05;
  const auto c = solve_collocation(Frequency(w), solve_ground_state(Frequency(w)).field);
  CHECK(std::abs(c.report.p4 / (4 * w * c.report.mass) - 1) < 1e-8);
  CHECK(std::abs(c.report.pohozaev) < 1e-8 * c.report.kinetic);
  CHECK(c.r.front() == 0.0);
  CHECK(c.r.back() == doctest::Approx(c.length));
}
