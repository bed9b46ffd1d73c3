#pragma once

#include <array>
#include <optional>

#include "cqnls/ground_state.hpp"
#include "cqnls/radial_core.hpp"

namespace cqnls {

/// Component integrals of a real radial field and the functionals built
/// from them:
///   mass      M = int u^2
///   kinetic   K = int |grad u|^2
///   energy    E = K/2 - p4/4 + p6/6
///   pohozaev  I = K/3 - p4/4 + p6/3
///   weinstein F = |u|_2 |u|_6^{3/2} |grad u|_2^{3/2} / |u|_4^4  (absent for u = 0)
struct FunctionalReport {
  double mass = 0.0;
  double energy = 0.0;
  double pohozaev = 0.0;
  std::optional<double> weinstein;
  double kinetic = 0.0;
  double p4 = 0.0;
  double p6 = 0.0;
};

FunctionalReport evaluate(const RealRadialFunction& u);

/// Assembles the report from precomputed component integrals.
FunctionalReport report_from_components(double mass, double kinetic, double p4, double p6);

/// Throws DivisionByZeroField for the zero field.
double weinstein(const RealRadialFunction& u);

/// H(u) = E(u) + nu M(u).
inline double action(const FunctionalReport& r, double nu) { return r.energy + nu * r.mass; }

/// amplitude * u(dilation * r) resampled on the same grid.
RealRadialFunction dilate(const RealRadialFunction& u, double amplitude, double dilation);

/// u_lambda(r) = lambda^{3/2} u(lambda r), the mass-preserving scaling.
RealRadialFunction scale(const RealRadialFunction& u, double lambda);

/// Larger positive root of lambda^2 A/3 - lambda^3 B/4 + lambda^6 C/3 = 0, the
/// scaling at which E(u_lambda) has its local minimum.
double pohozaev_zero_scale(double kinetic, double p4, double p6);

struct PohozaevRescaling {
  double lambda;
  RealRadialFunction field;
};

PohozaevRescaling rescale_to_pohozaev_zero(const RealRadialFunction& u);

/// p6 / K for an arbitrary field.
double raw_ratio(const RealRadialFunction& u);

/// beta(omega) = int Q^6 / int |grad Q|^2 for a converged ground state.
double beta(const RadialProfile& q);

struct RescaleFactors {
  double amplitude;   ///< sqrt((1 + beta) / (4 beta))
  double dilation;    ///< 3 (1 + beta) / (4 sqrt(3 beta))
  double mass_ratio;  ///< 16 sqrt(3 beta) / (9 (1 + beta)^2)
};

RescaleFactors rescale_factors(double beta);

/// Component integrals of amplitude * u(dilation * x) from those of u.
FunctionalReport transform_report(const FunctionalReport& r, double amplitude, double dilation);

/// R(r) = sqrt((1+beta)/(4 beta)) Q(3 (1+beta) r / (4 sqrt(3 beta))), with I(R) = 0.
RealRadialFunction rescaled_soliton(const RadialProfile& q);

struct Multipliers {
  double mu;
  double nu;
  double scale_a;
  double scale_lambda;
};

/// Inverts beta = (1 + 6 mu) / (3 (1 + 2 mu)) and omega = 2 nu (1 + 6 mu) / (1 + 3 mu)^2.
Multipliers recover_multipliers(double beta, double omega);
Multipliers recover_multipliers(const RadialProfile& q);

/// omega = 2 nu (1 + 6 mu) / (1 + 3 mu)^2
double frequency_from_multipliers(double mu, double nu);

/// Momentum int 2 Im(conj(u) grad u) dx. For radial fields the integrand is
/// parallel to x/|x| and averages to zero over each sphere.
std::array<double, 3> momentum(const ComplexRadialFunction& u);

/// int 2 Im(conj(u) u') dx, the radial current; zero for real fields.
double radial_current(const ComplexRadialFunction& u);

}  // namespace cqnls
