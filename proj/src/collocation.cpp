#include "cqnls/collocation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqnls/error.hpp"

namespace cqnls {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Differentiation matrix on x_j = cos(pi j / N), negative-sum diagonal.
MatrixXd chebyshev_matrix(std::size_t n, const VectorXd& x) {
  const auto m = static_cast<Eigen::Index>(n + 1);
  VectorXd c(m);
  for (Eigen::Index i = 0; i < m; ++i) c(i) = ((i == 0 || i == m - 1) ? 2.0 : 1.0) * ((i % 2) ? -1.0 : 1.0);
  MatrixXd d = MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      if (i != j) d(i, j) = (c(i) / c(j)) / (x(i) - x(j));
  for (Eigen::Index i = 0; i < m; ++i) d(i, i) = -d.row(i).sum();
  return d;
}

/// Clenshaw-Curtis weights on [-1, 1] for the same nodes.
VectorXd clenshaw_curtis(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  VectorXd w = VectorXd::Zero(m + 1);
  const double pi = std::numbers::pi;
  VectorXd v = VectorXd::Ones(m - 1);
  auto theta = [&](Eigen::Index k) { return pi * static_cast<double>(k) / static_cast<double>(m); };
  if (m % 2 == 0) {
    const double w0 = 1.0 / (static_cast<double>(m) * static_cast<double>(m) - 1.0);
    w(0) = w(m) = w0;
    for (Eigen::Index k = 1; k < m / 2; ++k)
      for (Eigen::Index i = 1; i < m; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * static_cast<double>(k) * theta(i)) / (4.0 * static_cast<double>(k * k) - 1.0);
    for (Eigen::Index i = 1; i < m; ++i) v(i - 1) -= std::cos(static_cast<double>(m) * theta(i)) * w0;
  } else {
    const double w0 = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    w(0) = w(m) = w0;
    for (Eigen::Index k = 1; k <= (m - 1) / 2; ++k)
      for (Eigen::Index i = 1; i < m; ++i)
        v(i - 1) -= 2.0 * std::cos(2.0 * static_cast<double>(k) * theta(i)) / (4.0 * static_cast<double>(k * k) - 1.0);
  }
  for (Eigen::Index i = 1; i < m; ++i) w(i) = 2.0 * v(i - 1) / static_cast<double>(m);
  return w;
}

}  // namespace

double CollocationSolution::profile(double radius) const {
  // barycentric weights for Gauss-Lobatto points: (-1)^j, halved at the ends
  const std::size_t m = r.size();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double diff = radius - r[j];
    const double q = (r[j] > 0.0) ? v[j] / r[j] : 0.0;
    if (diff == 0.0) {
      if (r[j] > 0.0) return q;
      break;
    }
    double w = (j % 2) ? -1.0 : 1.0;
    if (j == 0 || j + 1 == m) w *= 0.5;
    num += w * v[j] / diff;
    den += w / diff;
  }
  if (radius == 0.0) {
    // Q(0) = v'(0) from the interpolant's slope at the origin
    const double dr = 1e-6 * length;
    return profile(dr);
  }
  return num / den / radius;
}

CollocationSolution solve_collocation(Frequency omega, const RealRadialFunction& guess,
                                      const CollocationConfig& cfg) {
  if (cfg.order < 16) throw Error(ErrorKind::InvalidArgument, "collocation order must be at least 16");
  const double w = omega.value();
  const std::size_t n = cfg.order;
  const auto m = static_cast<Eigen::Index>(n + 1);

  double peak = 0.0, front = 0.0;
  for (double x : guess.values) peak = std::max(peak, x);
  for (std::size_t i = 0; i < guess.values.size(); ++i) {
    if (guess.values[i] < 0.5 * peak) {
      front = guess.grid.node(i);
      break;
    }
  }
  const double length = front + cfg.tail_length / std::sqrt(w);

  VectorXd x(m);
  for (Eigen::Index j = 0; j < m; ++j) x(j) = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  const MatrixXd dx = chebyshev_matrix(n, x);
  // r = L (1 - x) / 2, ascending in j
  VectorXd r = length * (1.0 - x.array()) / 2.0;
  const MatrixXd dr = (-2.0 / length) * dx;
  const MatrixXd d2 = dr * dr;

  const Eigen::Index ni = m - 2;
  const MatrixXd d2i = d2.block(1, 1, ni, ni);
  const VectorXd ri = r.segment(1, ni);

  // seed: perturbed amplitude and width so Newton cannot stop at step zero
  VectorXd v(ni);
  for (Eigen::Index j = 0; j < ni; ++j) {
    const double rr = 1.02 * ri(j);
    v(j) = rr <= guess.grid.r_max() ? 0.98 * ri(j) * interpolate(guess.grid, guess.values, rr) : 0.0;
  }

  auto residual_of = [&](const VectorXd& vv) {
    VectorXd q = vv.array() / ri.array();
    VectorXd q2 = q.array().square();
    VectorXd f = d2i * vv;
    f.array() += -w * vv.array() + vv.array() * q2.array() - vv.array() * q2.array().square();
    return f;
  };

  CollocationSolution sol;
  VectorXd f = residual_of(v);
  double fnorm = f.lpNorm<Eigen::Infinity>();
  int it = 0;
  for (; it < cfg.max_iterations && fnorm > cfg.newton_tolerance; ++it) {
    VectorXd q2 = (v.array() / ri.array()).square();
    MatrixXd jac = d2i;
    for (Eigen::Index j = 0; j < ni; ++j) jac(j, j) += -w + 3.0 * q2(j) - 5.0 * q2(j) * q2(j);
    const VectorXd step = jac.partialPivLu().solve(-f);
    double t = 1.0;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      VectorXd trial = v + t * step;
      VectorXd ft = residual_of(trial);
      const double tn = ft.lpNorm<Eigen::Infinity>();
      if (tn < (1.0 - 1e-4 * t) * fnorm || k == 29) {
        v = std::move(trial);
        f = std::move(ft);
        fnorm = tn;
        break;
      }
    }
  }
  if (!(fnorm <= cfg.newton_tolerance))
    throw Error(ErrorKind::ConvergenceFailure, "collocation Newton iteration did not converge");
  // a positive ground state has Q(0) above the first root of the mechanical potential
  const double q_peak = (v.array() / ri.array()).maxCoeff();
  if (q_peak < potential_well(omega).lower_root)
    throw Error(ErrorKind::ConvergenceFailure, "collocation converged to the trivial solution");

  VectorXd vfull = VectorXd::Zero(m);
  vfull.segment(1, ni) = v;
  const VectorXd dv = dr * vfull;
  const VectorXd cw = clenshaw_curtis(n) * (length / 2.0);
  const double four_pi = 4.0 * std::numbers::pi;
  double mass = 0.0, kin = 0.0, p4 = 0.0, p6 = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double vj = vfull(j);
    mass += cw(j) * vj * vj;
    kin += cw(j) * dv(j) * dv(j);
    if (r(j) > 0.0) {
      const double q2 = (vj / r(j)) * (vj / r(j));
      p4 += cw(j) * vj * vj * q2;
      p6 += cw(j) * vj * vj * q2 * q2;
    }
  }
  // int |grad u|^2 dx = 4 pi int v'^2 dr when v(0) = 0
  sol.report = report_from_components(four_pi * mass, four_pi * kin, four_pi * p4, four_pi * p6);
  sol.omega = w;
  sol.length = length;
  sol.r.assign(r.data(), r.data() + m);
  sol.v.assign(vfull.data(), vfull.data() + m);
  sol.iterations = it;
  sol.residual = fnorm;
  return sol;
}

}  // namespace cqnls
