#pragma once

#include <cstddef>
#include <vector>

#include "cqnls/functionals.hpp"
#include "cqnls/ground_state.hpp"

namespace cqnls {

struct CollocationConfig {
  std::size_t order = 512;      ///< Chebyshev polynomial degree
  double tail_length = 32.0;    ///< domain is [0, front + tail_length / sqrt(omega)]
  double newton_tolerance = 1e-11;
  int max_iterations = 60;
};

/// Ground state from a Chebyshev-Gauss-Lobatto collocation of
/// v'' = omega v - v^3 / r^2 + v^5 / r^4, v = r Q, v(0) = v(L) = 0, solved by
/// damped Newton. Shares no discretization with the shooting solver.
struct CollocationSolution {
  double omega = 0.0;
  double length = 0.0;
  std::vector<double> r;  ///< Gauss-Lobatto nodes on [0, L], ascending
  std::vector<double> v;  ///< r Q(r) at the nodes
  FunctionalReport report;
  int iterations = 0;
  double residual = 0.0;

  /// Q at r by barycentric interpolation.
  double profile(double radius) const;
};

/// initial_guess only seeds Newton; it is perturbed before use so the
/// iteration has to move.
CollocationSolution solve_collocation(Frequency omega, const RealRadialFunction& initial_guess,
                                      const CollocationConfig& cfg = {});

}  // namespace cqnls
