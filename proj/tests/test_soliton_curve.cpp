#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/soliton_curve.hpp"

using namespace cqnls;

namespace {

const SolitonCurve& curve() {
  static const SolitonCurve c = trace_curve(default_samples());
  return c;
}

double mass_at(double w) { return evaluate(solve_ground_state(Frequency(w)).field).mass; }

}  // namespace

TEST_CASE("sample layout") {
  const auto s = default_samples(5, 0.01, 0.11);
  REQUIRE(s.size() == 5);
  CHECK(s.front().value() == doctest::Approx(0.01));
  CHECK(s[2].value() == doctest::Approx(0.06));
  CHECK(s.back().value() == doctest::Approx(0.11));
  CHECK_THROWS_AS(default_samples(128, 0.1, 0.05), Error);
}

TEST_CASE("curve points obey the algebraic identities") {
  for (const auto& p : curve().points) {
    CHECK(std::abs(p.p4 / (4 * p.omega.value() * p.mass) - 1) < 1e-5);
    CHECK(p.energy == doctest::Approx((p.kinetic - p.p6) / 6).epsilon(1e-9));
    CHECK(p.beta == doctest::Approx(p.p6 / p.kinetic));
    CHECK(p.lambda_star == doctest::Approx(-8 * p.omega.value() + 4 * p.p6 / p.mass).epsilon(1e-9));
  }
}

TEST_CASE("trace is independent of chunking and threading") {
  const auto s = default_samples(24, 0.03, 0.15);
  CurveConfig a, b;
  a.parallel = false;
  b.chunk = 5;
  const auto pa = trace_points(s, a), pb = trace_points(s, b);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(pa[i].mass == doctest::Approx(pb[i].mass).epsilon(1e-11));
}

TEST_CASE("derivative identities along the curve") {
  const auto rep = check_identities(curve());
  CHECK(rep.method == SlopeMethod::Chebyshev);
  CHECK(rep.ok());
  CHECK(rep.max_energy_relative < 1e-3);
  CHECK(rep.max_kinetic_relative < 1e-3);
  CHECK(rep.max_algebraic < 1e-5);

  // independent route: central differences of fresh solves at one frequency
  const double w = 0.07, d = 1e-4;
  const auto lo = make_point(solve_ground_state(Frequency(w - d)));
  const auto mid = make_point(solve_ground_state(Frequency(w)));
  const auto hi = make_point(solve_ground_state(Frequency(w + d)));
  const double de = (hi.energy - lo.energy) / (2 * d), dm = (hi.mass - lo.mass) / (2 * d);
  const double dk = (hi.kinetic - lo.kinetic) / (2 * d);
  CHECK(de == doctest::Approx(-w / 2 * dm).epsilon(1e-4));
  CHECK(dk == doctest::Approx(1.5 * mid.mass).epsilon(1e-4));
}

TEST_CASE("mass curve is U-shaped around omega*") {
  const auto& c = curve();
  const double ws = c.omega_star.value();
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const auto& a = c.points[i - 1];
    const auto& b = c.points[i];
    if (b.omega.value() <= ws) CHECK(b.mass < a.mass);
    if (a.omega.value() >= ws) CHECK(b.mass > a.mass);
  }
  for (const auto& p : c.points) CHECK(p.mass >= c.m0);
}

// [DERIVED] frozen after shooting and collocation agreed to 1e-12 in mass
TEST_CASE("regression: curve constants") {
  const auto& c = curve();
  CHECK(c.m0 == doctest::Approx(189.45915725).epsilon(1e-9));
  CHECK(std::abs(c.omega_star.value() - 0.0255453) < 2e-6);
  CHECK(c.omega_zero_energy.value() == doctest::Approx(0.054735277979).epsilon(1e-9));
  CHECK(c.d0 == doctest::Approx(5.814880338559).epsilon(1e-9));
  CHECK(c.rho == doctest::Approx(240.44681494).epsilon(1e-9));
}

TEST_CASE("constants satisfy the published relations") {
  const auto& c = curve();
  CHECK(std::abs(c.rho / (64.0 / 9.0 * c.d0 * c.d0) - 1) < 1e-3);
  CHECK(4 / (3 * std::sqrt(3.0)) * c.rho <= c.m0);
  CHECK(c.m0 <= c.rho);
  CHECK(std::abs(c.energy_at_zero) < 1e-5 * c.kinetic_at_zero);
  // the Weinstein minimum sits at the zero-energy frequency
  const auto best = std::min_element(c.points.begin(), c.points.end(),
                                     [](const auto& a, const auto& b) { return a.weinstein < b.weinstein; });
  const auto idx = static_cast<std::size_t>(best - c.points.begin());
  REQUIRE(idx > 0);
  REQUIRE(idx + 1 < c.points.size());
  CHECK(c.points[idx - 1].omega.value() < c.omega_zero_energy.value());
  CHECK(c.omega_zero_energy.value() < c.points[idx + 1].omega.value());
}

TEST_CASE("critical frequency from disjoint brackets") {
  const auto& c = curve();
  const auto a = find_critical_frequency(c, 0.01, 0.015);
  const auto b = find_critical_frequency(c, 0.02, 0.03);
  const auto d = find_critical_frequency(c, 0.04, 0.06);
  CHECK(std::abs(a.omega_star.value() - b.omega_star.value()) < 1e-5);
  CHECK(std::abs(d.omega_star.value() - b.omega_star.value()) < 1e-5);
  CHECK(b.m0 == doctest::Approx(c.m0).epsilon(1e-10));
  CHECK(mass_at(b.omega_star.value() - 1e-3) > b.m0);
  CHECK(mass_at(b.omega_star.value() + 1e-3) > b.m0);

  // a range that stops short of the minimum
  SolitonCurve edge;
  edge.points = trace_points(default_samples(16, 0.04, 0.17));
  CHECK_THROWS_AS(find_critical_frequency(edge), Error);
  CHECK_THROWS_AS(trace_curve(default_samples(16, 0.04, 0.17)), Error);
}

TEST_CASE("stability classification by slope") {
  const auto& c = curve();
  const double ws = c.omega_star.value();
  const auto below = classify_stability(Frequency(ws / 2), c);
  CHECK(below.classification == Stability::Unstable);
  CHECK(below.slope < 0);
  const auto above = classify_stability(Frequency((ws + 3.0 / 16.0) / 2), c);
  CHECK(above.classification == Stability::Stable);
  CHECK(above.slope > 0);
  CHECK(classify_stability(c.omega_star, c).classification == Stability::Stable);
  CHECK(classify_stability(Frequency(ws - 1e-7), c).classification == Stability::Marginal);
}

TEST_CASE("normalized solutions: none, one, two") {
  const auto& c = curve();
  CHECK(normalized_solutions(c.m0 / 2, c).empty());
  const auto one = normalized_solutions(c.m0, c);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == c.omega_star);
  const auto two = normalized_solutions(2 * c.m0, c);
  REQUIRE(two.size() == 2);
  CHECK(two[0].value() < c.omega_star.value());
  CHECK(two[1].value() > c.omega_star.value());
  for (auto w : two) CHECK(std::abs(mass_at(w.value()) / (2 * c.m0) - 1) < 1e-4);
}

TEST_CASE("rescaled branch") {
  for (const auto& p : curve().points) {
    CHECK(rescaled_mass(p) <= p.mass * (1 + 1e-12));
    if (std::abs(p.beta - 1.0 / 3.0) < 1e-3) CHECK(rescaled_mass(p) == doctest::Approx(p.mass).epsilon(1e-5));
  }
}

TEST_CASE("variational values") {
  const auto& c = curve();
  const double floor = 4 / (3 * std::sqrt(3.0)) * c.rho;

  const auto at_rho = variational_values(c.rho, c);
  REQUIRE(std::holds_alternative<double>(at_rho.d_m));
  CHECK(std::abs(std::get<double>(at_rho.d_m)) < 1e-9 * c.rho);

  const auto big = variational_values(1.5 * c.rho, c);
  REQUIRE(std::holds_alternative<double>(big.d_m));
  REQUIRE(std::holds_alternative<double>(big.d_m_i));
  CHECK(std::get<double>(big.d_m) < 0);
  CHECK(std::get<double>(big.d_m) == doctest::Approx(std::get<double>(big.d_m_i)).epsilon(1e-4));
  // [DERIVED]
  CHECK(std::get<double>(big.d_m) == doctest::Approx(-4.0791126).epsilon(1e-6));

  const auto small = variational_values(0.9 * floor, c);
  CHECK(std::holds_alternative<Unbounded>(small.d_m_i));
  REQUIRE(std::holds_alternative<double>(small.d_m));
  CHECK(std::get<double>(small.d_m) == 0.0);
}

TEST_CASE("gradient flow reaches the branch minimum") {
  const auto& c = curve();
  const double m = 1.2 * c.rho;
  const auto v = variational_values(m, c);
  REQUIRE(std::holds_alternative<double>(v.d_m_i));
  const auto g = gradient_flow_oracle(m);
  CHECK(g.mass == doctest::Approx(m).epsilon(1e-10));
  CHECK(g.energy == doctest::Approx(std::get<double>(v.d_m_i)).epsilon(1e-2));
  CHECK(g.multiplier > 0);
  CHECK(g.multiplier < 3.0 / 16.0);
}
