#include "cqnls/spectral.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"

namespace cqnls {

std::string to_string(OperatorKind k) { return k == OperatorKind::LPlus ? "L+" : "L-"; }

RadialOperator build_operator(const RealRadialFunction& q, double omega, OperatorKind kind) {
  const auto& g = q.grid;
  const double h = g.spacing();
  RadialOperator op{g, std::vector<double>(g.size()), -1.0 / (h * h), kind, omega};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double q2 = q.values[i] * q.values[i];
    const double v = kind == OperatorKind::LPlus ? -3.0 * q2 + 5.0 * q2 * q2 : -q2 + q2 * q2;
    op.diagonal[i] = 2.0 / (h * h) + omega + v;
  }
  return op;
}

RadialOperator build_operator(const RadialProfile& q, OperatorKind kind) {
  return build_operator(q.field, q.omega.value(), kind);
}

std::vector<double> apply_operator(const RadialOperator& op, const std::vector<double>& v) {
  const std::size_t n = op.size();
  if (v.size() != n) throw Error(ErrorKind::GridMismatch, "vector length does not match the operator");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = op.diagonal[i] * v[i];
    if (i > 0) s += op.off_diagonal * v[i - 1];
    if (i + 1 < n) s += op.off_diagonal * v[i + 1];
    y[i] = s;
  }
  return y;
}

std::size_t count_below(const RadialOperator& op, double x) {
  const double b2 = op.off_diagonal * op.off_diagonal;
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < op.size(); ++i) {
    d = op.diagonal[i] - x - (i > 0 ? b2 / d : 0.0);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

namespace {

/// Solves (A - shift) x = b for the tridiagonal operator, partial pivoting.
std::vector<double> shifted_solve(const RadialOperator& op, double shift, std::vector<double> b) {
  const std::size_t n = op.size();
  const double e = op.off_diagonal;
  // rows hold (sub, diag, sup, sup2) after elimination
  std::vector<double> dg(n), up(n, 0.0), up2(n, 0.0), lo(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    dg[i] = op.diagonal[i] - shift;
    if (i + 1 < n) up[i] = e;
    if (i > 0) lo[i] = e;
  }
  std::vector<double> u1 = up, u2 = up2;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(lo[i + 1]) > std::abs(dg[i])) {
      // swap rows i and i+1
      std::swap(dg[i], lo[i + 1]);
      std::swap(u1[i], dg[i + 1]);
      std::swap(u2[i], u1[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (dg[i] == 0.0) dg[i] = std::numeric_limits<double>::epsilon() * std::abs(e);
    const double f = lo[i + 1] / dg[i];
    dg[i + 1] -= f * u1[i];
    u1[i + 1] -= f * u2[i];
    b[i + 1] -= f * b[i];
  }
  if (dg[n - 1] == 0.0) dg[n - 1] = std::numeric_limits<double>::epsilon() * std::abs(e);
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    if (i + 1 < n) s -= u1[i] * x[i + 1];
    if (i + 2 < n) s -= u2[i] * x[i + 2];
    x[i] = s / dg[i];
  }
  return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(std::vector<double>& v, double h) {
  const double s = 1.0 / std::sqrt(h * dot(v, v));
  for (double& x : v) x *= s;
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const RadialOperator& op, std::size_t k) {
  if (k == 0 || k > 8) throw Error(ErrorKind::InvalidArgument, "between one and eight eigenpairs");
  const std::size_t n = op.size();
  if (k > n) throw Error(ErrorKind::InvalidArgument, "more eigenpairs than grid points");
  const double h = op.grid.spacing();
  // Gershgorin bounds
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double d : op.diagonal) {
    lo = std::min(lo, d - 2.0 * std::abs(op.off_diagonal));
    hi = std::max(hi, d + 2.0 * std::abs(op.off_diagonal));
  }

  std::vector<double> values(k);
  for (std::size_t j = 0; j < k; ++j) {
    // smallest x with count_below(x) > j
    double a = lo, b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(op, mid) > j) b = mid; else a = mid;
    }
    values[j] = 0.5 * (a + b);
  }

  const double scale = std::max(std::abs(lo), std::abs(hi));
  std::vector<EigenPair> out;
  for (std::size_t j = 0; j < k; ++j) {
    const double lam = values[j];
    double gap = std::numeric_limits<double>::infinity();
    if (j > 0) gap = std::min(gap, lam - values[j - 1]);
    if (j + 1 < k) gap = std::min(gap, values[j + 1] - lam);
    const double shift = lam - 64.0 * std::numeric_limits<double>::epsilon() * scale;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i + 1) * static_cast<double>(j + 1));
    double res = 0.0;
    for (int it = 0; it < 6; ++it) {
      v = shifted_solve(op, shift, std::move(v));
      for (const auto& p : out) {
        const double c = h * dot(v, p.vector);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * p.vector[i];
      }
      normalize(v, h);
      auto av = apply_operator(op, v);
      double rayleigh = h * dot(v, av);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (av[i] - rayleigh * v[i]) * (av[i] - rayleigh * v[i]);
      res = std::sqrt(h * s);
      if (res < 1e-10 || (std::isfinite(gap) && res < 1e-8 * gap)) {
        if (it > 0) break;
      }
    }
    if (!(res < 1e-10 || (std::isfinite(gap) && res < 1e-8 * gap)))
      throw Error(ErrorKind::EigenConvergenceFailure,
                  fmt::format("inverse iteration for eigenvalue {} stalled at residual {:.3g}", j, res));
    // fix the sign so the largest-magnitude component is positive
    const auto m = std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*m < 0.0)
      for (double& x : v) x = -x;
    out.push_back({lam, std::move(v), res});
  }
  return out;
}

LambdaStar rayleigh_lambda_star(const RadialProfile& q) {
  const auto r = evaluate(q.field);
  LambdaStar ls;
  ls.formula = (-2.0 * r.p4 + 4.0 * r.p6) / r.mass;
  const auto op = build_operator(q, OperatorKind::LPlus);
  const auto& nodes = q.grid().nodes();
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = nodes[i] * q.values()[i];
  ls.rayleigh = dot(v, apply_operator(op, v)) / dot(v, v);
  return ls;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::GridMismatch, "vectors differ in length");
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

}  // namespace cqnls
