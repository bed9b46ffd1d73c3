#include "cqnls/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "cqnls/error.hpp"

namespace cqnls {

FunctionalReport report_from_components(double mass, double kinetic, double p4, double p6) {
  FunctionalReport r;
  r.mass = mass;
  r.kinetic = kinetic;
  r.p4 = p4;
  r.p6 = p6;
  r.energy = kinetic / 2.0 - p4 / 4.0 + p6 / 6.0;
  r.pohozaev = kinetic / 3.0 - p4 / 4.0 + p6 / 3.0;
  if (p4 > 0.0) r.weinstein = std::sqrt(mass) * std::pow(p6, 0.25) * std::pow(kinetic, 0.75) / p4;
  return r;
}

FunctionalReport evaluate(const RealRadialFunction& u) {
  const std::size_t n = u.values.size();
  std::vector<double> g2(n), g4(n), g6(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x2 = u.values[i] * u.values[i];
    g2[i] = x2;
    g4[i] = x2 * x2;
    g6[i] = x2 * x2 * x2;
  }
  return report_from_components(integrate_density(u.grid, g2), gradient_norm_sq(u),
                                integrate_density(u.grid, g4), integrate_density(u.grid, g6));
}

double weinstein(const RealRadialFunction& u) {
  const auto r = evaluate(u);
  if (!r.weinstein) throw Error(ErrorKind::DivisionByZeroField, "Weinstein functional of the zero field");
  return *r.weinstein;
}

RealRadialFunction dilate(const RealRadialFunction& u, double amplitude, double dilation) {
  if (!(dilation > 0.0)) throw Error(ErrorKind::InvalidArgument, "dilation must be positive");
  const RadialGrid& g = u.grid;
  double peak = 0.0;
  for (double x : u.values) peak = std::max(peak, std::abs(x));
  const double negligible = 1e-6 * peak;

  if (dilation < 1.0) {
    // content beyond dilation * r_max is pushed off the grid
    if (std::abs(interpolate(g, u.values, dilation * g.r_max())) > negligible)
      throw Error(ErrorKind::ScaleOutOfRange, "dilated field does not fit inside the grid");
  } else if (std::abs(u.values.back()) > negligible) {
    throw Error(ErrorKind::ScaleOutOfRange, "field is not negligible at the grid edge");
  }
  if (dilation > 1.0 && peak > 0.0) {
    double support = g.r_max();
    for (std::size_t i = g.size(); i-- > 0;) {
      if (std::abs(u.values[i]) > 1e-3 * peak) {
        support = g.node(i);
        break;
      }
    }
    if (support / dilation < 16.0 * g.spacing())
      throw Error(ErrorKind::ScaleOutOfRange, "compressed field is not resolved by the grid");
  }

  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = dilation * g.node(i);
    out[i] = r <= g.r_max() ? amplitude * interpolate(g, u.values, r) : 0.0;
  }
  return RealRadialFunction(g, std::move(out));
}

RealRadialFunction scale(const RealRadialFunction& u, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidArgument, "scaling parameter must be positive");
  if (lambda == 1.0) return u;
  return dilate(u, std::pow(lambda, 1.5), lambda);
}

double pohozaev_zero_scale(double a, double b, double c) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidField, "kinetic energy must be positive");
  if (!(b > 0.0 && c > 0.0)) throw Error(ErrorKind::NoPohozaevScale, "quartic or sextic integral vanishes");
  // phi(l) = A/3 - l B/4 + l^4 C/3 is convex with phi(0) > 0; I(u_l) = l^2 phi(l)
  auto phi = [&](double l) { return a / 3.0 - l * b / 4.0 + l * l * l * l * c / 3.0; };
  const double l_min = std::cbrt(3.0 * b / (16.0 * c));
  if (phi(l_min) >= 0.0)
    throw Error(ErrorKind::NoPohozaevScale, "I(u_lambda) has no sign change in lambda");
  double lo = l_min;
  double hi = std::cbrt(3.0 * b / (4.0 * c));  // phi(hi) = A/3 > 0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PohozaevRescaling rescale_to_pohozaev_zero(const RealRadialFunction& u) {
  const auto r = evaluate(u);
  const double lambda = pohozaev_zero_scale(r.kinetic, r.p4, r.p6);
  return {lambda, scale(u, lambda)};
}

double raw_ratio(const RealRadialFunction& u) {
  const auto r = evaluate(u);
  if (!(r.kinetic > 0.0)) throw Error(ErrorKind::InvalidField, "kinetic energy vanishes");
  return r.p6 / r.kinetic;
}

double beta(const RadialProfile& q) { return raw_ratio(q.field); }

RescaleFactors rescale_factors(double b) {
  if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  const double s = std::sqrt(3.0 * b);
  return {std::sqrt((1.0 + b) / (4.0 * b)), 3.0 * (1.0 + b) / (4.0 * s),
          16.0 * s / (9.0 * (1.0 + b) * (1.0 + b))};
}

FunctionalReport transform_report(const FunctionalReport& r, double amplitude, double dilation) {
  const double a2 = amplitude * amplitude;
  const double vol = 1.0 / (dilation * dilation * dilation);
  return report_from_components(a2 * vol * r.mass, a2 * dilation * dilation * vol * r.kinetic,
                                a2 * a2 * vol * r.p4, a2 * a2 * a2 * vol * r.p6);
}

RealRadialFunction rescaled_soliton(const RadialProfile& q) {
  const auto f = rescale_factors(beta(q));
  return dilate(q.field, f.amplitude, f.dilation);
}

Multipliers recover_multipliers(double b, double omega) {
  if (b < 1.0 / 3.0)
    throw Error(ErrorKind::MultiplierOutOfRange, "beta < 1/3 gives a negative multiplier mu");
  if (b >= 1.0) throw Error(ErrorKind::MultiplierOutOfRange, "beta >= 1 has no finite multiplier mu");
  const double mu = (3.0 * b - 1.0) / (6.0 * (1.0 - b));
  const double p = 1.0 + 3.0 * mu;
  const double nu = omega * p * p / (2.0 * (1.0 + 6.0 * mu));
  return {mu, nu, std::sqrt(p / (1.0 + 6.0 * mu)),
          std::sqrt(p * p / ((1.0 + 2.0 * mu) * (1.0 + 6.0 * mu)))};
}

Multipliers recover_multipliers(const RadialProfile& q) { return recover_multipliers(beta(q), q.omega.value()); }

double frequency_from_multipliers(double mu, double nu) {
  const double p = 1.0 + 3.0 * mu;
  return 2.0 * nu * (1.0 + 6.0 * mu) / (p * p);
}

std::array<double, 3> momentum(const ComplexRadialFunction& u) {
  (void)u;
  return {0.0, 0.0, 0.0};
}

double radial_current(const ComplexRadialFunction& u) {
  std::vector<double> re(u.values.size()), im(u.values.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = u.values[i].real();
    im[i] = u.values[i].imag();
  }
  const auto dre = radial_derivative(u.grid, re);
  const auto dim = radial_derivative(u.grid, im);
  std::vector<double> j(re.size());
  // Im(conj(u) u') = re * im' - im * re'
  for (std::size_t i = 0; i < j.size(); ++i) j[i] = 2.0 * (re[i] * dim[i] - im[i] * dre[i]);
  return integrate_density(u.grid, j);
}

}  // namespace cqnls
