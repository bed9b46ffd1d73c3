#include "cqnls/kernels.hpp"

#include <array>
#include <cassert>

namespace cqnls::kernels {

namespace {

inline cplx phase_factor(cplx v, double inv_r, double tau) {
  const cplx u = v * inv_r;
  const double n2 = std::norm(u);
  const double angle = tau * (n2 - n2 * n2);
  return {std::cos(angle), std::sin(angle)};
}

template <class Term>
double blocked_sum(std::size_t n, Term term) {
  std::array<double, kReductionBlocks> partial{};
  const std::size_t chunk = (n + kReductionBlocks - 1) / kReductionBlocks;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < kReductionBlocks; ++b) {
    const std::size_t lo = b * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace

namespace serial {

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  assert(values.size() == weights.size());
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

double weighted_norm_sq(std::span<const cplx> z, std::span<const double> weights) {
  assert(z.size() == weights.size());
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += std::norm(z[i]) * weights[i];
  return s;
}

void nonlinear_phase(std::span<cplx> v, std::span<const double> inv_r, double tau,
                     std::span<const double> damping) {
  assert(v.size() == inv_r.size());
  const bool damp = !damping.empty();
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] *= phase_factor(v[i], inv_r[i], tau);
    if (damp) v[i] *= damping[i];
  }
}

void pointwise_multiply(std::span<cplx> a, std::span<const cplx> b) {
  assert(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
}

}  // namespace serial

namespace parallel {

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  assert(values.size() == weights.size());
  return blocked_sum(values.size(), [&](std::size_t i) { return values[i] * weights[i]; });
}

double weighted_norm_sq(std::span<const cplx> z, std::span<const double> weights) {
  assert(z.size() == weights.size());
  return blocked_sum(z.size(), [&](std::size_t i) { return std::norm(z[i]) * weights[i]; });
}

void nonlinear_phase(std::span<cplx> v, std::span<const double> inv_r, double tau,
                     std::span<const double> damping) {
  assert(v.size() == inv_r.size());
  const bool damp = !damping.empty();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    v[i] *= phase_factor(v[i], inv_r[i], tau);
    if (damp) v[i] *= damping[i];
  }
}

void pointwise_multiply(std::span<cplx> a, std::span<const cplx> b) {
  assert(a.size() == b.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) a[i] *= b[i];
}

}  // namespace parallel

}  // namespace cqnls::kernels
