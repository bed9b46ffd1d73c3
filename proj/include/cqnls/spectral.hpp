#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cqnls/ground_state.hpp"
#include "cqnls/radial_core.hpp"

namespace cqnls {

enum class OperatorKind { LPlus, LMinus };

std::string to_string(OperatorKind k);

/// -d^2/dr^2 + omega + V(r) on v = r u with v = 0 at r = 0 and one spacing past
/// r_max, second-order stencil. LPlus: V = -3Q^2 + 5Q^4, LMinus: V = -Q^2 + Q^4.
struct RadialOperator {
  RadialGrid grid;
  std::vector<double> diagonal;
  double off_diagonal;  ///< -1/h^2 on every superdiagonal entry
  OperatorKind kind;
  double omega;

  std::size_t size() const { return diagonal.size(); }
};

RadialOperator build_operator(const RadialProfile& q, OperatorKind kind);
RadialOperator build_operator(const RealRadialFunction& q, double omega, OperatorKind kind);

/// y = A v.
std::vector<double> apply_operator(const RadialOperator& op, const std::vector<double>& v);

/// Number of eigenvalues strictly below x (Sturm sequence).
std::size_t count_below(const RadialOperator& op, double x);

struct EigenPair {
  double value;
  std::vector<double> vector;  ///< v = r u with h sum v^2 = 1
  double residual;             ///< |(A - value) vector|, discrete L2
};

/// k smallest eigenpairs, ascending, by Sturm bisection and inverse iteration.
std::vector<EigenPair> lowest_eigenpairs(const RadialOperator& op, std::size_t k);

struct LambdaStar {
  double formula;   ///< (-2 int Q^4 + 4 int Q^6) / int Q^2
  double rayleigh;  ///< <rQ, L+ rQ> / <rQ, rQ> through build_operator
};

LambdaStar rayleigh_lambda_star(const RadialProfile& q);

/// Cosine of the angle between two sampled vectors.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace cqnls
