#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cqnls/functionals.hpp"
#include "cqnls/ground_state.hpp"

namespace cqnls {

struct CurvePoint {
  Frequency omega;
  double mass;
  double energy;
  double kinetic;
  double p4;
  double p6;
  double beta;
  double lambda_star;  ///< (-2 int Q^4 + 4 int Q^6) / int Q^2
  double weinstein;
  double plateau_offset;
};

/// Builds the record and enforces int Q^4 = 4 omega int Q^2 to 1e-5 and
/// |I(Q)| < 1e-6 K; throws ConvergenceFailure otherwise.
CurvePoint make_point(const RadialProfile& q);

struct CurveSummary {
  Frequency omega_star{0.1};
  double m0 = 0.0;
  Frequency omega_zero_energy{0.1};
  double d0 = 0.0;
  double rho = 0.0;
  double energy_at_zero = 0.0;   ///< E(Q) at omega_zero_energy
  double kinetic_at_zero = 0.0;
};

struct SolitonCurve {
  std::vector<CurvePoint> points;
  Frequency omega_star{0.1};
  double m0 = 0.0;
  Frequency omega_zero_energy{0.1};
  double d0 = 0.0;
  double rho = 0.0;
  double energy_at_zero = 0.0;
  double kinetic_at_zero = 0.0;
  ShootingConfig solver;

  double omega_min() const { return points.front().omega.value(); }
  double omega_max() const { return points.back().omega.value(); }
};

struct CurveConfig {
  ShootingConfig solver;
  /// Consecutive samples solved by one worker, each warm-started from the last.
  std::size_t chunk = 8;
  bool parallel = true;
  /// Golden-section stopping width for omega*.
  double omega_tolerance = 1e-6;
};

/// n samples lo + (hi - lo) (1 - cos(pi j / (n-1))) / 2, clustered at both ends.
std::vector<Frequency> default_samples(std::size_t n = 128, double lo = 0.002, double hi = 0.18);

/// Solves every sample. The partition into chunks is fixed, so the result
/// does not depend on the thread count.
std::vector<CurvePoint> trace_points(const std::vector<Frequency>& samples, const CurveConfig& cfg = {});

/// trace_points plus the summary constants from fresh solves.
SolitonCurve trace_curve(const std::vector<Frequency>& samples, const CurveConfig& cfg = {});

/// Recomputes the summary of an existing point list.
CurveSummary summarize(const std::vector<CurvePoint>& points, const CurveConfig& cfg = {});

struct IdentityViolation {
  std::string identity;
  double omega;
  double residual;
  double tolerance;
};

enum class SlopeMethod { Chebyshev, CentralDifference };

struct IdentityReport {
  SlopeMethod method = SlopeMethod::CentralDifference;
  std::vector<double> omega;         ///< samples where slopes are judged
  std::vector<double> energy_slope;  ///< dE/domega by `method`
  std::vector<double> mass_slope;
  std::vector<double> kinetic_slope;
  double max_energy_relative = 0.0;  ///< |dE + (omega/2) dM| / |dE|
  double max_energy_absolute = 0.0;  ///< max |dE + (omega/2) dM|
  double max_kinetic_relative = 0.0;
  double max_algebraic = 0.0;        ///< per-point p4 = 4 omega M and I = 0
  /// Three-point central differences at interior samples, always computed.
  std::vector<double> central_energy_residual;
  std::vector<double> central_kinetic_residual;
  std::vector<IdentityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// A sample passes when its residual is below max(relative * scale, absolute);
/// the absolute floor only matters where dE/domega crosses zero at omega*.
struct IdentityTolerances {
  double relative = 1e-3;
  double absolute = 1e-6;
};

/// Slopes come from Chebyshev differentiation when the samples are the
/// Gauss-Lobatto layout of default_samples, otherwise from central differences.
IdentityReport check_identities(const std::vector<CurvePoint>& points, const IdentityTolerances& tol = {});
inline IdentityReport check_identities(const SolitonCurve& c, const IdentityTolerances& tol = {}) {
  return check_identities(c.points, tol);
}

struct CriticalPoint {
  Frequency omega_star;
  double m0;
  int evaluations;
};

/// Golden-section minimization of omega -> M(Q_omega) with fresh solves,
/// started from the sampled minimum.
CriticalPoint find_critical_frequency(const SolitonCurve& curve, double tolerance = 1e-6);

/// Same, started from an arbitrary seed bracket inside the traced range.
/// The bracket is widened downhill until it encloses a minimum.
CriticalPoint find_critical_frequency(const SolitonCurve& curve, double lo, double hi,
                                      double tolerance = 1e-6);

enum class Stability { Stable, Unstable, Marginal };

std::string to_string(Stability s);

struct StabilityVerdict {
  Stability classification;
  double slope;           ///< dM/domega at omega
  double omega_vs_star;   ///< omega - omega*
  std::string evidence;
};

/// Stable for omega >= omega*, Marginal for omega* - resolution <= omega < omega*,
/// Unstable below. The slope is a central difference of fresh solves.
StabilityVerdict classify_stability(Frequency omega, const SolitonCurve& curve, double resolution = 1e-6);

/// Frequencies with M(Q_omega) = m: none below m0, omega* at m0, one per
/// monotone branch above.
std::vector<Frequency> normalized_solutions(double m, const SolitonCurve& curve,
                                            double mass_resolution = 1e-9);

struct Unbounded {
  friend bool operator==(Unbounded, Unbounded) = default;
};

using VariationalValue = std::variant<double, Unbounded>;

enum class Branch { Q, R };

struct VariationalCandidate {
  Branch branch;
  Frequency omega;
  double energy;
};

struct VariationalResult {
  VariationalValue d_m;
  VariationalValue d_m_i;
  std::vector<VariationalCandidate> candidates;  ///< all constrained critical points found
  /// Both branches attain the minimum within the tie tolerance.
  bool degenerate_minimum = false;
};

/// mass of the rescaled soliton R_omega at a curve point
double rescaled_mass(const CurvePoint& p);
double rescaled_energy(const CurvePoint& p);

VariationalResult variational_values(double m, const SolitonCurve& curve, double tie_tolerance = 1e-8);

struct GradientFlowConfig {
  double spacing = 1.0 / 16.0;
  double r_max = 0.0;   ///< 0 picks a radius from the mass
  double tau = 0.5;
  int max_steps = 200000;
  int rescale_every = 50;
  /// Rescaling stops once the stationarity residual is below this; near the
  /// minimizer it only reintroduces the quadrature mismatch.
  double rescale_until = 1e-4;
  /// Stop when |-v'' - (|u|^2 - |u|^4) v + omega v| / |v| falls below this.
  double tolerance = 1e-9;
};

struct GradientFlowResult {
  RealRadialFunction field;
  double energy;
  double mass;
  double multiplier;  ///< Lagrange multiplier omega of the terminal state
  int steps;
};

/// Normalized gradient flow for E at fixed mass on the grid of v = r u.
/// Throws OracleDidNotConverge when max_steps is exhausted.
GradientFlowResult gradient_flow_oracle(double m, const GradientFlowConfig& cfg = {});

}  // namespace cqnls
