#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cqnls/radial_core.hpp"

namespace cqnls {

/// Frequency of a standing wave Q(x) e^{i omega t}. Positive radial ground
/// states exist exactly for 0 < omega < 3/16.
class Frequency {
 public:
  static constexpr double kUpper = 3.0 / 16.0;

  explicit Frequency(double omega);
  double value() const { return omega_; }

  friend bool operator==(Frequency a, Frequency b) = default;
  friend auto operator<=>(Frequency a, Frequency b) = default;

 private:
  double omega_;
};

/// Critical points of the mechanical potential G(a) = a^4/4 - a^6/6 - omega a^2/2
/// that governs the radial shooting problem.
struct PotentialWell {
  double lower_root;  ///< smallest positive root of G
  double upper_root;  ///< largest root of G
  double plateau;     ///< nonzero equilibrium a_+ with omega - a^2 + a^4 = 0
  double plateau_split;  ///< sqrt(1 - 4 omega) = a_+^2 - a_-^2
};

PotentialWell potential_well(Frequency omega);

struct ShootingConfig {
  double ode_rtol = 1e-12;
  double ode_atol = 1e-14;
  /// Relative width at which bisection on the amplitude offset stops.
  double bisection_tolerance = 8.0 * 2.220446049250313e-16;
  /// 0 selects a radius from the frequency.
  double max_radius = 0.0;
  double start_radius = 1e-4;
  /// Rebound is declared when Q' >= 0 while Q > threshold * a.
  double overshoot_threshold = 1e-3;
  std::size_t scan_candidates = 512;
  /// Bracketing shots must agree to this relative level where the profile is kept.
  double splice_tolerance = 1e-6;
  double grid_spacing = kDefaultSpacing;
  /// Plateau offset a_+ - a of a nearby solution, used to seed the bracket.
  std::optional<double> offset_hint;

  void validate() const;
};

enum class ShotKind { Undershoot, Overshoot, Undecided };

/// Accepted integration steps of one shot, starting from the series start.
struct ShootingTrajectory {
  double omega = 0.0;
  double amplitude = 0.0;
  double threshold = 0.0;
  std::vector<double> r;
  std::vector<double> q;
  std::vector<double> dq;
};

struct ShotOutcome {
  ShotKind kind;
  double event_radius;
};

/// Integrates Q'' + (2/r) Q' = omega Q - Q^3 + Q^5 from the series start with
/// Q(0) = a_+ - plateau_offset until the first crossing, rebound, or max_radius.
ShootingTrajectory shoot(Frequency omega, double plateau_offset, const ShootingConfig& cfg);

/// Undershoot: Q crosses zero with Q' < 0. Overshoot: Q' >= 0 while Q is above
/// the threshold. Undecided: neither before the end of the trajectory.
ShotOutcome classify_shot(const ShootingTrajectory& trajectory);

struct RadialProfile {
  RealRadialFunction field;
  Frequency omega;
  double amplitude;       ///< Q(0)
  double plateau_offset;  ///< a_+ - Q(0), carried at full relative precision
  double decay_c;
  double decay_rate;
  double splice_radius;   ///< beyond this node the tail is c e^{-sqrt(omega) r} / r
  double front_radius;    ///< where Q falls to half its amplitude

  const RadialGrid& grid() const { return field.grid; }
  const std::vector<double>& values() const { return field.values; }
};

/// Positive radial solution of -Q'' - (2/r) Q' + omega Q - Q^3 + Q^5 = 0 by
/// shooting on the central amplitude and bisection.
RadialProfile solve_ground_state(Frequency omega, const ShootingConfig& cfg = {});

/// Same, sampled on a caller-supplied grid.
RadialProfile solve_ground_state(Frequency omega, const ShootingConfig& cfg, const RadialGrid& grid);

/// max_i |Q'' + (2/r) Q' - omega Q + Q^3 - Q^5| / max |Q| over nodes reached
/// by centered stencils.
double residual(const RealRadialFunction& q, double omega);
double residual(const RadialProfile& profile);

struct DecayFit {
  double c;
  double rate;
};

/// Least-squares fit of log(r Q) = log c - rate r over [lo, hi] * r_max.
DecayFit fit_decay(const RealRadialFunction& q, double lo = 0.6, double hi = 0.85);
DecayFit fit_decay(const RadialProfile& profile);

/// Least-squares fit over an explicit radial window.
DecayFit fit_decay_window(const RealRadialFunction& q, double r_lo, double r_hi);

}  // namespace cqnls
