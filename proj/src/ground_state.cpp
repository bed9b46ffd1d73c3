#include "cqnls/ground_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cqnls/error.hpp"

namespace cqnls {

namespace {

using State = std::array<double, 2>;

/// Right-hand side of the radial equation. Near the plateau the unknown is
/// w = a_+ - Q so that amplitudes within 1e-20 of a_+ stay representable;
/// once Q drops below a_+/2 the state switches to (Q, Q').
class RadialEquation {
 public:
  RadialEquation(double omega, const PotentialWell& well)
      : omega_(omega), plateau_(well.plateau), split_(well.plateau_split) {}

  bool plateau_mode() const { return plateau_mode_; }

  State derivative(double r, const State& y) const {
    if (plateau_mode_) {
      const double w = y[0];
      const double q = plateau_ - w;
      const double t = w * (2.0 * plateau_ - w);  // a_+^2 - Q^2
      const double g = t * (t - split_);          // omega - Q^2 + Q^4
      return {y[1], -2.0 * y[1] / r - q * g};
    }
    const double q = y[0];
    const double q2 = q * q;
    return {y[1], -2.0 * y[1] / r + q * (omega_ - q2 + q2 * q2)};
  }

  double q(const State& y) const { return plateau_mode_ ? plateau_ - y[0] : y[0]; }
  double dq(const State& y) const { return plateau_mode_ ? -y[1] : y[1]; }

  /// Leaves plateau mode once Q < a_+/2; returns true if the state changed.
  bool maybe_switch(State& y) {
    if (plateau_mode_ && y[0] > 0.5 * plateau_) {
      y = {plateau_ - y[0], -y[1]};
      plateau_mode_ = false;
      return true;
    }
    return false;
  }

  State series_start(double offset, double r0) const {
    const double q0 = plateau_ - offset;
    const double t = offset * (2.0 * plateau_ - offset);
    const double f = q0 * t * (t - split_);  // omega a - a^3 + a^5
    return {offset - f * r0 * r0 / 6.0, -f * r0 / 3.0};
  }

 private:
  double omega_;
  double plateau_;
  double split_;
  bool plateau_mode_ = true;
};

/// Dormand-Prince 5(4) with a max-norm error controller.
class DormandPrince {
 public:
  DormandPrince(double rtol, double atol) : rtol_(rtol), atol_(atol) {}

  /// Advances (r, y) by at most h_try without passing r_end. Updates h_try to
  /// the suggested next step. Returns false if the step was rejected.
  bool attempt(const RadialEquation& eq, double& r, State& y, double& h_try, double r_end) {
    const double h = std::min(h_try, r_end - r);
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto add = [](const State& y0, std::initializer_list<std::pair<double, const State*>> terms,
                  double hh) {
      State out = y0;
      for (const auto& [c, k] : terms) {
        out[0] += hh * c * (*k)[0];
        out[1] += hh * c * (*k)[1];
      }
      return out;
    };

    const State k1 = eq.derivative(r, y);
    const State k2 = eq.derivative(r + c2 * h, add(y, {{a21, &k1}}, h));
    const State k3 = eq.derivative(r + c3 * h, add(y, {{a31, &k1}, {a32, &k2}}, h));
    const State k4 = eq.derivative(r + c4 * h, add(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State k5 =
        eq.derivative(r + c5 * h, add(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State k6 = eq.derivative(
        r + h, add(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State y_new = add(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State k7 = eq.derivative(r + h, y_new);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) {
      h_try = 0.25 * h;
      return false;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      r = (h == r_end - r) ? r_end : r + h;
      y = y_new;
      h_try = std::max(h * factor, 1e-12);
      return true;
    }
    h_try = h * std::max(factor, 0.1);
    return false;
  }

 private:
  double rtol_;
  double atol_;
};

double default_max_radius(double omega) {
  // tail length plus the bubble radius, which grows like 1/(3/16 - omega)
  return 60.0 / std::sqrt(omega) + 2.0 / (Frequency::kUpper - omega);
}

/// Integrates one shot until the first event or max_radius. With
/// node_spacing > 0 every step ends on a multiple of node_spacing and only
/// those points are recorded, so the kept samples are exactly the ones the
/// classification saw.
ShootingTrajectory shoot_to(Frequency omega, double offset, const ShootingConfig& cfg,
                            double max_radius, double node_spacing = 0.0) {
  const PotentialWell well = potential_well(omega);
  RadialEquation eq(omega.value(), well);
  DormandPrince stepper(cfg.ode_rtol, cfg.ode_atol);

  ShootingTrajectory tr;
  tr.omega = omega.value();
  tr.amplitude = well.plateau - offset;
  tr.threshold = cfg.overshoot_threshold * tr.amplitude;

  double r = cfg.start_radius;
  State y = eq.series_start(offset, r);
  auto record = [&] {
    tr.r.push_back(r);
    tr.q.push_back(eq.q(y));
    tr.dq.push_back(eq.dq(y));
  };
  auto event = [&] {
    const double q = tr.q.back();
    return q < 0.0 || (tr.dq.back() >= 0.0 && q > tr.threshold);
  };
  record();
  double h = 1e-3;
  std::size_t guard = 0;
  auto advance_to = [&](double target) {
    while (r < target) {
      if (++guard > 100'000'000)
        throw Error(ErrorKind::ConvergenceFailure, "shooting step limit exceeded");
      if (!stepper.attempt(eq, r, y, h, target)) {
        if (h < 1e-14) throw Error(ErrorKind::ConvergenceFailure, "shooting step size underflow");
        continue;
      }
      eq.maybe_switch(y);
      if (node_spacing == 0.0) {
        record();
        if (event()) return false;
      }
    }
    return true;
  };
  if (node_spacing > 0.0) {
    for (std::size_t k = 1;; ++k) {
      const double node = static_cast<double>(k) * node_spacing;
      if (node > max_radius) break;
      advance_to(node);
      record();
      if (event()) break;
    }
  } else {
    advance_to(max_radius);
  }
  return tr;
}

std::string omega_text(Frequency omega) { return "omega = " + std::to_string(omega.value()); }

struct Bracket {
  double crossing;  // offset giving Undershoot (smaller offset)
  double rebound;   // offset giving Overshoot
};

class Shooter {
 public:
  Shooter(Frequency omega, const ShootingConfig& cfg)
      : omega_(omega), cfg_(cfg), well_(potential_well(omega)),
        max_radius_(cfg.max_radius > 0.0 ? cfg.max_radius : default_max_radius(omega.value())) {}

  /// node_spacing = 0 integrates with free adaptive steps.
  ShootingTrajectory run(double offset, double node_spacing) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      auto t = shoot_to(omega_, offset, cfg_, max_radius_, node_spacing);
      if (classify_shot(t).kind != ShotKind::Undecided) return t;
      max_radius_ *= 2.0;
    }
    throw Error(ErrorKind::ConvergenceFailure,
                "shot reached no event within the enlarged radius for " + omega_text(omega_));
  }

  ShotKind classify(double offset, double node_spacing = 0.0) {
    return classify_shot(run(offset, node_spacing)).kind;
  }

  std::optional<Bracket> from_hint(double hint) {
    if (!(hint > 0.0)) return std::nullopt;
    const double top = well_.plateau - well_.lower_root;
    double s = std::min(hint, 0.999 * top);
    if (classify(s) == ShotKind::Undershoot) {
      for (int i = 0; i < 64; ++i) {
        const double up = std::min(2.0 * s, 0.5 * (s + top));
        if (classify(up) == ShotKind::Overshoot) return Bracket{s, up};
        s = up;
      }
    } else {
      for (int i = 0; i < 1100; ++i) {
        const double down = 0.5 * s;
        if (down < std::numeric_limits<double>::min()) break;
        if (classify(down) == ShotKind::Undershoot) return Bracket{down, s};
        s = down;
      }
    }
    return std::nullopt;
  }

  Bracket scan() {
    // Candidates run from just below a_+ downward; the ground state is the
    // first Overshoot -> Undershoot transition met in increasing amplitude.
    const std::size_t m = cfg_.scan_candidates;
    const double lo = well_.lower_root;
    const double hi = well_.upper_root;
    std::optional<double> crossing;
    double closest = 0.0;
    for (std::size_t j = m; j-- > 1;) {
      const double a = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(m);
      const double s = well_.plateau - a;
      if (!(s > 0.0)) continue;  // above a_+ every shot rebounds at once
      if (closest == 0.0) closest = s;
      const ShotKind k = classify(s);
      if (k == ShotKind::Undershoot) {
        crossing = s;
      } else if (crossing) {
        return {*crossing, s};
      }
    }
    if (crossing) {
      throw Error(ErrorKind::ShootingBracketFailure,
                  "no rebounding amplitude below the crossing ones for " + omega_text(omega_));
    }
    // The crossing window (a_gs, a_+) is narrower than the candidate spacing:
    // walk the offset down geometrically from the closest candidate.
    double previous = closest;
    for (double s = 1e-2 * closest; s > 1e-300; s *= 1e-2) {
      if (classify(s) == ShotKind::Undershoot) return {s, previous};
      previous = s;
    }
    throw Error(ErrorKind::ShootingBracketFailure, "no amplitude bracket for " + omega_text(omega_));
  }

  /// Splits the bracket until its relative width drops below tol or the
  /// midpoint is no longer representable.
  Bracket bisect(Bracket b, double tol, double node_spacing) {
    for (int it = 0; it < 4000; ++it) {
      const double width = b.rebound - b.crossing;
      if (width <= tol * b.rebound) return b;
      const double mid = (b.rebound > 4.0 * b.crossing) ? std::sqrt(b.crossing * b.rebound)
                                                        : b.crossing + 0.5 * width;
      if (mid <= b.crossing || mid >= b.rebound) return b;
      if (classify(mid, node_spacing) == ShotKind::Undershoot) {
        b.crossing = mid;
      } else {
        b.rebound = mid;
      }
    }
    throw Error(ErrorKind::ConvergenceFailure, "bisection stalled for " + omega_text(omega_));
  }

  /// Re-establishes the bracket under node-aligned stepping, widening it if
  /// the change of step sequence moved the transition.
  Bracket rebracket_on_nodes(Bracket b, double node_spacing) {
    double width = std::max(b.rebound - b.crossing, 4.0 * std::numeric_limits<double>::epsilon() * b.rebound);
    for (int i = 0; i < 200 && classify(b.crossing, node_spacing) != ShotKind::Undershoot; ++i) {
      b.crossing = std::max(b.crossing - width, 0.5 * b.crossing);
      width *= 4.0;
    }
    width = std::max(b.rebound - b.crossing, width);
    for (int i = 0; i < 200 && classify(b.rebound, node_spacing) != ShotKind::Overshoot; ++i) {
      b.rebound += width;
      width *= 4.0;
    }
    return b;
  }

  const PotentialWell& well() const { return well_; }

 private:
  Frequency omega_;
  ShootingConfig cfg_;
  PotentialWell well_;
  double max_radius_;
};

struct BisectionResult {
  Bracket bracket;
  PotentialWell well;
  ShootingTrajectory crossing;  // node-aligned
  ShootingTrajectory rebound;   // node-aligned
};

BisectionResult bracket_ground_state(Frequency omega, const ShootingConfig& cfg, double node_spacing) {
  cfg.validate();
  Shooter shooter(omega, cfg);
  std::optional<Bracket> b;
  if (cfg.offset_hint) b = shooter.from_hint(*cfg.offset_hint);
  if (!b) b = shooter.scan();
  Bracket coarse = shooter.bisect(*b, std::max(cfg.bisection_tolerance, 1e-10), 0.0);
  coarse = shooter.rebracket_on_nodes(coarse, node_spacing);
  const Bracket fine = shooter.bisect(coarse, cfg.bisection_tolerance, node_spacing);
  return {fine, shooter.well(), shooter.run(fine.crossing, node_spacing),
          shooter.run(fine.rebound, node_spacing)};
}

RadialProfile build_profile(Frequency omega, const ShootingConfig& cfg, const RadialGrid& grid,
                            const BisectionResult& bis) {
  // trajectories hold r0 first, then node k h at index k
  const auto& lo = bis.crossing.q;
  const auto& hi = bis.rebound.q;
  const std::size_t common = std::min({lo.size(), hi.size(), grid.size() + 1});
  if (common < 9)
    throw Error(ErrorKind::ConvergenceFailure, "bracketing shots diverge immediately for " + omega_text(omega));

  std::vector<double> q(grid.size());
  std::size_t keep = 0;
  for (std::size_t k = 1; k < common; ++k, ++keep) {
    const double mid = 0.5 * (lo[k] + hi[k]);
    if (!(mid > 0.0)) break;
    if (std::abs(lo[k] - hi[k]) > cfg.splice_tolerance * mid) break;
    if (keep > 0 && mid > q[keep - 1]) break;
    q[keep] = mid;
  }
  if (keep < 8)
    throw Error(ErrorKind::ConvergenceFailure, "bracket too wide to build a profile for " + omega_text(omega));

  const double k = std::sqrt(omega.value());
  const std::size_t last = keep - 1;
  const double r_s = grid.node(last);
  for (std::size_t i = keep; i < grid.size(); ++i) {
    const double r = grid.node(i);
    q[i] = q[last] * (r_s / r) * std::exp(-k * (r - r_s));
  }

  const double offset = 0.5 * (bis.bracket.crossing + bis.bracket.rebound);
  const double amplitude = bis.well.plateau - offset;
  double front = grid.r_max();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (q[i] < 0.5 * amplitude) {
      front = grid.node(i);
      break;
    }
  }

  RealRadialFunction field(grid, std::move(q));
  const DecayFit fit = fit_decay(field);
  return RadialProfile{std::move(field), omega, amplitude, offset, fit.c, fit.rate, r_s, front};
}

double half_amplitude_radius(const ShootingTrajectory& t) {
  for (std::size_t i = 0; i < t.r.size(); ++i)
    if (t.q[i] < 0.5 * t.amplitude) return t.r[i];
  return t.r.empty() ? 0.0 : t.r.back();
}

}  // namespace

Frequency::Frequency(double omega) : omega_(omega) {
  if (!(omega > 0.0 && omega < kUpper)) {
    throw Error(ErrorKind::NoGroundState,
                "omega = " + std::to_string(omega) + " lies outside the window (0, 3/16)");
  }
}

PotentialWell potential_well(Frequency omega) {
  const double w = omega.value();
  // roots in x = a^2 of x^2/6 - x/4 + w/2 = 0; product of roots is 3w
  const double x_hi = 3.0 * (0.25 + std::sqrt(0.0625 - w / 3.0));
  const double x_lo = 3.0 * w / x_hi;
  const double split = std::sqrt(1.0 - 4.0 * w);
  return {std::sqrt(x_lo), std::sqrt(x_hi), std::sqrt(0.5 * (1.0 + split)), split};
}

void ShootingConfig::validate() const {
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(ode_rtol > 0.0 && ode_atol > 0.0))
    throw Error(ErrorKind::InvalidArgument, "ODE tolerances must be positive");
  if (!(bisection_tolerance >= 8.0 * eps))
    throw Error(ErrorKind::InvalidArgument, "bisection tolerance must be at least 8 machine epsilons");
  if (max_radius < 0.0) throw Error(ErrorKind::InvalidArgument, "max_radius must be non-negative");
  if (!(start_radius > 0.0 && start_radius < 1e-2))
    throw Error(ErrorKind::InvalidArgument, "start radius must lie in (0, 1e-2)");
  if (!(overshoot_threshold > 0.0 && overshoot_threshold < 1.0))
    throw Error(ErrorKind::InvalidArgument, "overshoot threshold must lie in (0, 1)");
  if (scan_candidates < 2) throw Error(ErrorKind::InvalidArgument, "need at least two scan candidates");
  if (!(splice_tolerance > 0.0 && splice_tolerance < 1.0))
    throw Error(ErrorKind::InvalidArgument, "splice tolerance must lie in (0, 1)");
  if (!(grid_spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
}

ShootingTrajectory shoot(Frequency omega, double plateau_offset, const ShootingConfig& cfg) {
  cfg.validate();
  const double r_max = cfg.max_radius > 0.0 ? cfg.max_radius : default_max_radius(omega.value());
  return shoot_to(omega, plateau_offset, cfg, r_max);
}

ShotOutcome classify_shot(const ShootingTrajectory& t) {
  for (std::size_t i = 1; i < t.r.size(); ++i) {
    if (t.q[i] < 0.0) {
      // linear interpolation of the crossing point
      const double f = t.q[i - 1] / (t.q[i - 1] - t.q[i]);
      return {ShotKind::Undershoot, t.r[i - 1] + f * (t.r[i] - t.r[i - 1])};
    }
    if (t.dq[i] >= 0.0 && t.q[i] > t.threshold) return {ShotKind::Overshoot, t.r[i]};
  }
  return {ShotKind::Undecided, t.r.empty() ? 0.0 : t.r.back()};
}

RadialProfile solve_ground_state(Frequency omega, const ShootingConfig& cfg) {
  const auto bis = bracket_ground_state(omega, cfg, cfg.grid_spacing);
  // the bubble radius grows without bound as omega -> 3/16, so the tail
  // allowance is measured from the front rather than from the origin
  const double radius = std::max(40.0 / std::sqrt(omega.value()), 60.0) + half_amplitude_radius(bis.crossing);
  return build_profile(omega, cfg, RadialGrid::with_spacing(cfg.grid_spacing, radius), bis);
}

RadialProfile solve_ground_state(Frequency omega, const ShootingConfig& cfg, const RadialGrid& grid) {
  const auto bis = bracket_ground_state(omega, cfg, grid.spacing());
  return build_profile(omega, cfg, grid, bis);
}

double residual(const RealRadialFunction& q, double omega) {
  const auto& v = q.values;
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  const auto d1 = radial_derivative(q.grid, v);
  const auto d2 = radial_second_derivative(q.grid, v);
  double worst = 0.0;
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    const double r = q.grid.node(i);
    const double x = v[i];
    const double x2 = x * x;
    const double res = d2[i] + 2.0 * d1[i] / r - omega * x + x * x2 - x * x2 * x2;
    worst = std::max(worst, std::abs(res));
  }
  return worst / scale;
}

double residual(const RadialProfile& p) { return residual(p.field, p.omega.value()); }

DecayFit fit_decay_window(const RealRadialFunction& q, double r_lo, double r_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    const double r = q.grid.node(i);
    if (r < r_lo || r > r_hi) continue;
    if (!(q.values[i] > 0.0))
      throw Error(ErrorKind::DecayFitFailure, "non-positive sample at r = " + std::to_string(r));
    const double y = std::log(r * q.values[i]);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorKind::DecayFitFailure, "fit window holds fewer than two nodes");
  const double dm = static_cast<double>(m);
  const double denom = dm * sxx - sx * sx;
  const double slope = (dm * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / dm;
  return {std::exp(intercept), -slope};
}

DecayFit fit_decay(const RealRadialFunction& q, double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "fit window fractions must satisfy 0 <= lo < hi <= 1");
  return fit_decay_window(q, lo * q.grid.r_max(), hi * q.grid.r_max());
}

DecayFit fit_decay(const RadialProfile& p) { return fit_decay(p.field); }

}  // namespace cqnls
