#include "cqnls/soliton_curve.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>

#include "cqnls/error.hpp"

namespace cqnls {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi

std::string omega_context(double w) { return fmt::format("omega = {:.17g}", w); }

RadialProfile solve_at(double w, const ShootingConfig& base, std::optional<double> hint) {
  ShootingConfig cfg = base;
  if (hint) cfg.offset_hint = hint;
  try {
    return solve_ground_state(Frequency(w), cfg);
  } catch (const Error& e) {
    throw e.with_context(omega_context(w));
  }
}

/// Plateau offset of the sample nearest to w, a good warm start.
std::optional<double> nearest_hint(const std::vector<CurvePoint>& pts, double w) {
  if (pts.empty()) return std::nullopt;
  auto it = std::lower_bound(pts.begin(), pts.end(), w,
                             [](const CurvePoint& p, double x) { return p.omega.value() < x; });
  if (it == pts.end()) return pts.back().plateau_offset;
  if (it != pts.begin() && w - std::prev(it)->omega.value() < it->omega.value() - w)
    return std::prev(it)->plateau_offset;
  return it->plateau_offset;
}

CurvePoint solve_point(double w, const ShootingConfig& cfg, const std::vector<CurvePoint>& pts) {
  return make_point(solve_at(w, cfg, nearest_hint(pts, w)));
}

/// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) differ in sign.
template <class F>
double bisect_root(F&& f, double lo, double hi, double f_lo, double width) {
  for (int it = 0; it < 200 && hi - lo > width; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Samples lie on lo + (hi - lo) (1 - cos(pi j / (n-1))) / 2.
bool is_gauss_lobatto(const std::vector<double>& w) {
  const std::size_t n = w.size();
  const double lo = w.front(), hi = w.back();
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n - 1);
    const double x = lo + (hi - lo) * (1.0 - std::cos(std::numbers::pi * t)) / 2.0;
    if (std::abs(x - w[j]) > 1e-12 * (hi - lo)) return false;
  }
  return true;
}

/// Row-major differentiation matrix in omega for Gauss-Lobatto samples.
std::vector<double> chebyshev_derivative_matrix(const std::vector<double>& w) {
  const std::size_t n = w.size();
  const double scale = -2.0 / (w.back() - w.front());  // omega increases as x = cos decreases
  std::vector<double> x(n), c(n), d(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    x[j] = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n - 1));
    c[j] = ((j == 0 || j + 1 == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double v = (c[i] / c[j]) / (x[i] - x[j]);
      d[i * n + j] = scale * v;
      diag -= v;
    }
    d[i * n + i] = scale * diag;
  }
  return d;
}

/// Three-point central difference on a nonuniform grid.
double central_slope(double x0, double x1, double x2, double f0, double f1, double f2) {
  const double h1 = x1 - x0, h2 = x2 - x1;
  return (h1 * h1 * f2 - h2 * h2 * f0 + (h2 * h2 - h1 * h1) * f1) / (h1 * h2 * (h1 + h2));
}

}  // namespace

CurvePoint make_point(const RadialProfile& q) {
  const double w = q.omega.value();
  const auto r = evaluate(q.field);
  if (std::abs(r.p4 / (4.0 * w * r.mass) - 1.0) > 1e-5 || std::abs(r.pohozaev) > 1e-6 * r.kinetic)
    throw Error(ErrorKind::ConvergenceFailure,
                fmt::format("{}: ground state violates the integral identities", omega_context(w)));
  return CurvePoint{q.omega,
                    r.mass,
                    r.energy,
                    r.kinetic,
                    r.p4,
                    r.p6,
                    r.p6 / r.kinetic,
                    (-2.0 * r.p4 + 4.0 * r.p6) / r.mass,
                    *r.weinstein,
                    q.plateau_offset};
}

std::vector<Frequency> default_samples(std::size_t n, double lo, double hi) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "sample range must have lo < hi");
  std::vector<Frequency> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n - 1);
    out.emplace_back(lo + (hi - lo) * (1.0 - std::cos(std::numbers::pi * t)) / 2.0);
  }
  return out;
}

std::vector<CurvePoint> trace_points(const std::vector<Frequency>& samples, const CurveConfig& cfg) {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no frequency samples");
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw Error(ErrorKind::InvalidArgument, "frequency samples must be sorted");
  cfg.solver.validate();
  const std::size_t chunk = std::max<std::size_t>(cfg.chunk, 1);
  const std::size_t n = samples.size();
  const auto chunks = static_cast<long>((n + chunk - 1) / chunk);

  std::vector<std::optional<CurvePoint>> slots(n);
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(chunks));

  auto run_chunk = [&](long c) {
    std::optional<double> hint;
    const std::size_t begin = static_cast<std::size_t>(c) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    try {
      for (std::size_t i = begin; i < end; ++i) {
        const auto q = solve_at(samples[i].value(), cfg.solver, hint);
        slots[i] = make_point(q);
        hint = q.plateau_offset;
      }
    } catch (...) {
      failures[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };

  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<CurvePoint> pts;
  pts.reserve(n);
  for (auto& s : slots) pts.push_back(*s);
  return pts;
}

CurveSummary summarize(const std::vector<CurvePoint>& pts, const CurveConfig& cfg) {
  if (pts.size() < 3) throw Error(ErrorKind::CurveRangeTooNarrow, "need at least three curve points");
  SolitonCurve tmp;
  tmp.points = pts;
  tmp.solver = cfg.solver;
  const auto crit = find_critical_frequency(tmp, cfg.omega_tolerance);

  // E = (K - p6) / 6 on the curve, positive for small omega
  std::size_t j = 0;
  while (j < pts.size() && pts[j].energy > 0.0) ++j;
  if (j == 0 || j == pts.size())
    throw Error(ErrorKind::CurveRangeTooNarrow, "energy does not change sign over the traced range");
  auto energy_at = [&](double w) { return solve_point(w, cfg.solver, pts).energy; };
  const double w0 = bisect_root(energy_at, pts[j - 1].omega.value(), pts[j].omega.value(),
                                pts[j - 1].energy, 1e-12);
  const auto p0 = solve_point(w0, cfg.solver, pts);

  CurveSummary s;
  s.omega_star = crit.omega_star;
  s.m0 = crit.m0;
  s.omega_zero_energy = p0.omega;
  s.d0 = p0.weinstein;
  s.rho = p0.mass;
  s.energy_at_zero = p0.energy;
  s.kinetic_at_zero = p0.kinetic;
  return s;
}

SolitonCurve trace_curve(const std::vector<Frequency>& samples, const CurveConfig& cfg) {
  SolitonCurve c;
  c.points = trace_points(samples, cfg);
  c.solver = cfg.solver;
  c.solver.offset_hint.reset();
  const auto s = summarize(c.points, cfg);
  c.omega_star = s.omega_star;
  c.m0 = s.m0;
  c.omega_zero_energy = s.omega_zero_energy;
  c.d0 = s.d0;
  c.rho = s.rho;
  c.energy_at_zero = s.energy_at_zero;
  c.kinetic_at_zero = s.kinetic_at_zero;
  return c;
}

IdentityReport check_identities(const std::vector<CurvePoint>& pts, const IdentityTolerances& tol) {
  IdentityReport rep;
  for (const auto& p : pts) {
    const double w = p.omega.value();
    const double alg = std::max(std::abs(p.p4 / (4.0 * w * p.mass) - 1.0),
                                std::abs(p.kinetic / 3.0 - p.p4 / 4.0 + p.p6 / 3.0) / p.kinetic);
    rep.max_algebraic = std::max(rep.max_algebraic, alg);
    if (alg > 1e-5) rep.violations.push_back({"algebraic", w, alg, 1e-5});
  }
  const std::size_t n = pts.size();
  if (n < 3) return rep;

  std::vector<double> w(n), mass(n), energy(n), kinetic(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = pts[i].omega.value();
    mass[i] = pts[i].mass;
    energy[i] = pts[i].energy;
    kinetic[i] = pts[i].kinetic;
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double de = central_slope(w[i - 1], w[i], w[i + 1], energy[i - 1], energy[i], energy[i + 1]);
    const double dm = central_slope(w[i - 1], w[i], w[i + 1], mass[i - 1], mass[i], mass[i + 1]);
    const double dk = central_slope(w[i - 1], w[i], w[i + 1], kinetic[i - 1], kinetic[i], kinetic[i + 1]);
    rep.central_energy_residual.push_back(de + 0.5 * w[i] * dm);
    rep.central_kinetic_residual.push_back(dk - 1.5 * mass[i]);
  }

  if (is_gauss_lobatto(w)) {
    rep.method = SlopeMethod::Chebyshev;
    const auto d = chebyshev_derivative_matrix(w);
    auto apply = [&](const std::vector<double>& f) {
      std::vector<double> out(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i] += d[i * n + j] * f[j];
      return out;
    };
    rep.omega = w;
    rep.energy_slope = apply(energy);
    rep.mass_slope = apply(mass);
    rep.kinetic_slope = apply(kinetic);
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rep.omega.push_back(w[i]);
      rep.energy_slope.push_back(central_slope(w[i - 1], w[i], w[i + 1], energy[i - 1], energy[i], energy[i + 1]));
      rep.mass_slope.push_back(central_slope(w[i - 1], w[i], w[i + 1], mass[i - 1], mass[i], mass[i + 1]));
      rep.kinetic_slope.push_back(central_slope(w[i - 1], w[i], w[i + 1], kinetic[i - 1], kinetic[i], kinetic[i + 1]));
    }
  }

  for (std::size_t k = 0; k < rep.omega.size(); ++k) {
    const double x = rep.omega[k];
    const double de = rep.energy_slope[k];
    const double res_e = std::abs(de + 0.5 * x * rep.mass_slope[k]);
    rep.max_energy_absolute = std::max(rep.max_energy_absolute, res_e);
    rep.max_energy_relative = std::max(rep.max_energy_relative, res_e / std::abs(de));
    const double lim_e = std::max(tol.relative * std::abs(de), tol.absolute);
    if (res_e > lim_e) rep.violations.push_back({"dE = -(omega/2) dM", x, res_e, lim_e});

    const double m = 1.5 * mass[rep.method == SlopeMethod::Chebyshev ? k : k + 1];
    const double res_k = std::abs(rep.kinetic_slope[k] - m);
    rep.max_kinetic_relative = std::max(rep.max_kinetic_relative, res_k / m);
    const double lim_k = std::max(tol.relative * m, tol.absolute);
    if (res_k > lim_k) rep.violations.push_back({"dK = (3/2) M", x, res_k, lim_k});
  }
  return rep;
}

namespace {

CriticalPoint golden_minimize(const SolitonCurve& curve, double a, double b, double c, double fb,
                              double tolerance, int evals) {
  // a < b < c with f(b) below both ends
  auto f = [&](double w) {
    ++evals;
    return solve_point(w, curve.solver, curve.points).mass;
  };
  while (c - a > tolerance) {
    const bool right = (c - b) > (b - a);
    const double x = right ? b + kGolden * (c - b) : b - kGolden * (b - a);
    const double fx = f(x);
    if (fx < fb) {
      if (right) a = b; else c = b;
      b = x;
      fb = fx;
    } else {
      if (right) c = x; else a = x;
    }
  }
  return {Frequency(b), fb, evals};
}

}  // namespace

CriticalPoint find_critical_frequency(const SolitonCurve& curve, double tolerance) {
  const auto& pts = curve.points;
  if (pts.size() < 3) throw Error(ErrorKind::CurveRangeTooNarrow, "need at least three curve points");
  std::size_t i = 0;
  for (std::size_t k = 1; k < pts.size(); ++k)
    if (pts[k].mass < pts[i].mass) i = k;
  if (i == 0 || i + 1 == pts.size())
    throw Error(ErrorKind::CurveRangeTooNarrow, "mass minimum lies at the edge of the traced range");
  return golden_minimize(curve, pts[i - 1].omega.value(), pts[i].omega.value(), pts[i + 1].omega.value(),
                         pts[i].mass, tolerance, 0);
}

CriticalPoint find_critical_frequency(const SolitonCurve& curve, double lo, double hi, double tolerance) {
  const double w_min = curve.omega_min(), w_max = curve.omega_max();
  if (!(lo < hi) || lo < w_min || hi > w_max)
    throw Error(ErrorKind::InvalidArgument, "seed bracket must be ordered and inside the traced range");
  int evals = 0;
  auto f = [&](double w) {
    ++evals;
    return solve_point(w, curve.solver, curve.points).mass;
  };
  double a = lo, b = hi, fa = f(a), fb = f(b);
  if (fb > fa) {
    std::swap(a, b);
    std::swap(fa, fb);
  }
  // walk downhill from a through b with growing steps
  const double grow = 1.0 / kGolden - 1.0;  // phi
  double c = b + grow * (b - a);
  auto out_of_range = [&](double x) { return x <= w_min || x >= w_max; };
  if (out_of_range(c)) c = std::clamp(c, w_min, w_max);
  double fc = f(c);
  while (fc < fb) {
    if (c == w_min || c == w_max)
      throw Error(ErrorKind::CurveRangeTooNarrow, "mass decreases up to the edge of the traced range");
    a = b;
    fa = fb;
    b = c;
    fb = fc;
    c = std::clamp(b + grow * (b - a), w_min, w_max);
    fc = f(c);
  }
  if (a > c) std::swap(a, c);
  return golden_minimize(curve, a, b, c, fb, tolerance, evals);
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Unstable: return "Unstable";
    case Stability::Marginal: return "Marginal";
  }
  return "?";
}

StabilityVerdict classify_stability(Frequency omega, const SolitonCurve& curve, double resolution) {
  const double w = omega.value();
  const double star = curve.omega_star.value();
  const double delta = std::min({1e-4, 0.5 * w, 0.5 * (Frequency::kUpper - w)});
  const double m_plus = solve_point(w + delta, curve.solver, curve.points).mass;
  const double m_minus = solve_point(w - delta, curve.solver, curve.points).mass;
  StabilityVerdict v;
  v.slope = (m_plus - m_minus) / (2.0 * delta);
  v.omega_vs_star = w - star;
  if (w >= star) {
    v.classification = Stability::Stable;
    v.evidence = v.slope > 0.0 ? "omega >= omega*, dM/domega > 0" : "omega >= omega*";
  } else if (star - w < resolution) {
    v.classification = Stability::Marginal;
    v.evidence = "omega within resolution below omega*";
  } else {
    v.classification = Stability::Unstable;
    v.evidence = v.slope < 0.0 ? "omega < omega*, dM/domega < 0" : "omega < omega*, zero slope folded";
  }
  return v;
}

std::vector<Frequency> normalized_solutions(double m, const SolitonCurve& curve, double mass_resolution) {
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  const double m0 = curve.m0;
  if (m < m0 * (1.0 - mass_resolution)) return {};
  if (std::abs(m - m0) <= mass_resolution * m0) return {curve.omega_star};
  const auto& pts = curve.points;
  const double star = curve.omega_star.value();
  if (pts.front().mass < m || pts.back().mass < m)
    throw Error(ErrorKind::CurveRangeTooNarrow, fmt::format("mass {:.17g} exceeds the traced range", m));

  auto mass_gap = [&](double w) { return solve_point(w, curve.solver, pts).mass - m; };
  std::vector<Frequency> out;
  // left branch: decreasing from pts.front() down to m0
  {
    std::size_t j = 0;
    while (j + 1 < pts.size() && pts[j + 1].omega.value() < star && pts[j + 1].mass >= m) ++j;
    const double hi = (j + 1 < pts.size() && pts[j + 1].omega.value() < star) ? pts[j + 1].omega.value() : star;
    out.emplace_back(bisect_root(mass_gap, pts[j].omega.value(), hi, pts[j].mass - m, 1e-13));
  }
  // right branch: increasing from m0 up to pts.back()
  {
    std::size_t j = pts.size() - 1;
    while (j > 0 && pts[j - 1].omega.value() > star && pts[j - 1].mass >= m) --j;
    const double lo = (j > 0 && pts[j - 1].omega.value() > star) ? pts[j - 1].omega.value() : star;
    out.emplace_back(bisect_root(mass_gap, lo, pts[j].omega.value(), m0 - m, 1e-13));
  }
  return out;
}

double rescaled_mass(const CurvePoint& p) { return rescale_factors(p.beta).mass_ratio * p.mass; }

double rescaled_energy(const CurvePoint& p) {
  const auto f = rescale_factors(p.beta);
  return transform_report(report_from_components(p.mass, p.kinetic, p.p4, p.p6), f.amplitude, f.dilation).energy;
}

VariationalResult variational_values(double m, const SolitonCurve& curve, double tie_tolerance) {
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  const auto& pts = curve.points;
  const double rho = curve.rho;
  const double floor_i = 4.0 / (3.0 * std::sqrt(3.0)) * rho;
  VariationalResult res;

  const double q_max = std::min(pts.front().mass, pts.back().mass);
  double r_max = 0.0;
  for (const auto& p : pts) {
    if (p.beta > 1.0 / 3.0) r_max = std::max(r_max, rescaled_mass(p));
  }
  if (m > std::max(q_max, r_max))
    throw Error(ErrorKind::CurveRangeTooNarrow, fmt::format("mass {:.17g} exceeds the traced range", m));

  for (const auto& w : normalized_solutions(m, curve))
    res.candidates.push_back({Branch::Q, w, solve_point(w.value(), curve.solver, pts).energy});

  std::optional<double> q_best;
  for (const auto& c : res.candidates) q_best = q_best ? std::min(*q_best, c.energy) : c.energy;
  if (m <= rho) {
    res.d_m = 0.0;
  } else {
    res.d_m = *q_best;
  }

  if (m < floor_i * (1.0 - 1e-12)) {
    res.d_m_i = Unbounded{};
    return res;
  }

  // R branch: roots of M(R_omega) = m among samples with beta > 1/3
  auto r_gap = [&](double w) { return rescaled_mass(solve_point(w, curve.solver, pts)) - m; };
  std::optional<double> r_best;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i].beta > 1.0 / 3.0)) continue;
    const double g0 = rescaled_mass(pts[i]) - m, g1 = rescaled_mass(pts[i + 1]) - m;
    if ((g0 > 0.0) == (g1 > 0.0)) continue;
    const double w = bisect_root(r_gap, pts[i].omega.value(), pts[i + 1].omega.value(), g0, 1e-13);
    const double e = rescaled_energy(solve_point(w, curve.solver, pts));
    res.candidates.push_back({Branch::R, Frequency(w), e});
    r_best = r_best ? std::min(*r_best, e) : e;
  }
  if (!r_best && std::abs(m - floor_i) <= 1e-9 * m) {
    // the minimum of M(R) sits at beta = 1
    const double e = rescaled_energy(solve_point(curve.omega_zero_energy.value(), curve.solver, pts));
    res.candidates.push_back({Branch::R, curve.omega_zero_energy, e});
    r_best = e;
  }

  if (q_best && r_best) {
    res.d_m_i = std::min(*q_best, *r_best);
    res.degenerate_minimum =
        std::abs(*q_best - *r_best) <= tie_tolerance * std::max(std::abs(*q_best), std::abs(*r_best));
  } else if (q_best) {
    res.d_m_i = *q_best;
  } else if (r_best) {
    res.d_m_i = *r_best;
  } else {
    throw Error(ErrorKind::CurveRangeTooNarrow, "no constrained critical point found for this mass");
  }
  return res;
}

GradientFlowResult gradient_flow_oracle(double m, const GradientFlowConfig& cfg) {
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  if (!(cfg.spacing > 0.0) || !(cfg.tau > 0.0) || cfg.max_steps <= 0)
    throw Error(ErrorKind::InvalidArgument, "invalid gradient-flow configuration");
  const double four_pi = 4.0 * std::numbers::pi;
  // tanh bubble of plateau height ~0.9 holding the mass
  const double height = 0.9;
  const double bubble = std::cbrt(3.0 * m / (four_pi * height * height));
  const double h = cfg.spacing;
  const double r_max = cfg.r_max > 0.0 ? cfg.r_max : 2.0 * bubble + 40.0;
  const auto n = static_cast<std::size_t>(std::ceil(r_max / h));
  const RadialGrid grid(static_cast<double>(n) * h, n);
  const auto& r = grid.nodes();

  std::vector<double> v(n), rhs(n), c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = r[i] * height * 0.5 * (1.0 - std::tanh((r[i] - bubble) / 2.0));

  auto normalize = [&] {
    double s = 0.0;
    for (double x : v) s += x * x;
    const double f = std::sqrt(m / (four_pi * h * s));
    for (double& x : v) x *= f;
  };
  auto to_field = [&] {
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = v[i] / r[i];
    return RealRadialFunction(grid, std::move(u));
  };
  // residual of -v'' - (u^2 - u^4) v + omega v with omega the Rayleigh multiplier
  auto stationarity = [&](double& omega) {
    double num = 0.0, den = 0.0;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i > 0 ? v[i - 1] : 0.0, right = i + 1 < n ? v[i + 1] : 0.0;
      const double u2 = (v[i] / r[i]) * (v[i] / r[i]);
      g[i] = -(left - 2.0 * v[i] + right) / (h * h) - (u2 - u2 * u2) * v[i];
      num -= g[i] * v[i];
      den += v[i] * v[i];
    }
    omega = num / den;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (g[i] + omega * v[i]) * (g[i] + omega * v[i]);
    return std::sqrt(s / den);
  };

  normalize();
  const double tau = cfg.tau;
  const double off = -tau / (h * h), diag = 1.0 + 2.0 * tau / (h * h);
  double omega = 0.0, stat = 1.0;
  int step = 0;
  for (; step < cfg.max_steps; ++step) {
    if (step % 100 == 0) {
      stat = stationarity(omega);
      if (stat < cfg.tolerance) break;
    }
    // (1 - tau d^2/dr^2 - tau V(u)) v_new = v with V = u^2 - u^4 frozen, so a
    // fixed point of step plus normalization solves the stationary equation
    for (std::size_t i = 0; i < n; ++i) {
      const double u2 = (v[i] / r[i]) * (v[i] / r[i]);
      rhs[i] = diag - tau * (u2 - u2 * u2);
    }
    c[0] = off / rhs[0];
    d[0] = v[0] / rhs[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double denom = rhs[i] - off * c[i - 1];
      c[i] = off / denom;
      d[i] = (v[i] - off * d[i - 1]) / denom;
    }
    v[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) v[i] = d[i] - c[i] * v[i + 1];
    normalize();
    if (cfg.rescale_every > 0 && step % cfg.rescale_every == 0 && stat > cfg.rescale_until) {
      try {
        const auto s = rescale_to_pohozaev_zero(to_field());
        for (std::size_t i = 0; i < n; ++i) v[i] = r[i] * s.field.values[i];
        normalize();
      } catch (const Error&) {
        // no Pohozaev scale yet for this iterate
      }
    }
    for (double x : v)
      if (!std::isfinite(x)) throw Error(ErrorKind::OracleDidNotConverge, "gradient flow produced non-finite values");
  }
  if (step >= cfg.max_steps)
    throw Error(ErrorKind::OracleDidNotConverge,
                fmt::format("gradient flow not stationary after {} steps", cfg.max_steps));
  auto field = to_field();
  const auto rep = evaluate(field);
  return {std::move(field), rep.energy, rep.mass, omega, step};
}

}  // namespace cqnls
