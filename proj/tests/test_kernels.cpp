#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "cqnls/kernels.hpp"

using namespace cqnls::kernels;

namespace {

struct Data {
  std::vector<double> x, w, inv_r, damp;
  std::vector<cplx> z, b;
};

Data make(std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.x.push_back(u(rng));
    d.w.push_back(std::abs(u(rng)));
    d.inv_r.push_back(1.0 / (0.1 * (i + 1)));
    d.damp.push_back(1.0 - 0.01 * std::abs(u(rng)));
    d.z.emplace_back(u(rng), u(rng));
    d.b.emplace_back(u(rng), u(rng));
  }
  return d;
}

}  // namespace

TEST_CASE("parallel reductions agree with the serial loop") {
  for (std::size_t n : {1ul, 63ul, 64ul, 1000ul, 100003ul}) {
    const auto d = make(n);
    CHECK(parallel::weighted_sum(d.x, d.w) == doctest::Approx(serial::weighted_sum(d.x, d.w)).epsilon(1e-12));
    CHECK(parallel::weighted_norm_sq(d.z, d.w) ==
          doctest::Approx(serial::weighted_norm_sq(d.z, d.w)).epsilon(1e-12));
  }
}

TEST_CASE("parallel reductions do not depend on the thread count") {
  const auto d = make(100003);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double a = parallel::weighted_sum(d.x, d.w);
  const double na = parallel::weighted_norm_sq(d.z, d.w);
  omp_set_num_threads(4);
  const double b = parallel::weighted_sum(d.x, d.w);
  const double nb = parallel::weighted_norm_sq(d.z, d.w);
  omp_set_num_threads(saved);
  CHECK(a == b);
  CHECK(na == nb);
}

TEST_CASE("pointwise kernels are bitwise identical") {
  for (bool damped : {false, true}) {
    auto d = make(5001);
    auto s = d.z, p = d.z;
    const std::span<const double> damp = damped ? std::span<const double>(d.damp) : std::span<const double>();
    serial::nonlinear_phase(s, d.inv_r, 0.37, damp);
    parallel::nonlinear_phase(p, d.inv_r, 0.37, damp);
    CHECK(s == p);
    serial::pointwise_multiply(s, d.b);
    parallel::pointwise_multiply(p, d.b);
    CHECK(s == p);
  }
}

TEST_CASE("undamped nonlinear phase preserves modulus") {
  auto d = make(257);
  auto v = d.z;
  serial::nonlinear_phase(v, d.inv_r, 1.3, {});
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i]) == doctest::Approx(std::abs(d.z[i])));
  // exponent is tau (|u|^2 - |u|^4)
  const cplx u = d.z[5] * d.inv_r[5];
  const double a2 = std::norm(u);
  const cplx expected = d.z[5] * std::polar(1.0, 1.3 * (a2 - a2 * a2));
  CHECK(std::abs(v[5] - expected) < 1e-14);
}
