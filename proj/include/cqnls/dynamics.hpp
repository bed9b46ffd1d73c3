#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cqnls/ground_state.hpp"
#include "cqnls/radial_core.hpp"
#include "cqnls/soliton_curve.hpp"

namespace cqnls {

/// u(t, r) stored as v = r u on the grid nodes; v vanishes at r = 0 and one
/// spacing beyond r_max.
struct ComplexRadialField {
  RadialGrid grid;
  std::vector<std::complex<double>> v_values;
  double time = 0.0;

  ComplexRadialField(RadialGrid g, std::vector<std::complex<double>> v, double t = 0.0);

  static ComplexRadialField from_u(const ComplexRadialFunction& u, double t = 0.0);
  ComplexRadialFunction u() const;
  ComplexRadialField conjugate() const;
};

struct DynamicsGrid {
  double spacing = 1.0 / 16.0;
  /// r_max is this multiple of the ground-state default radius.
  double radius_factor = 2.0;
};

/// Grid for time evolution at frequency omega.
RadialGrid dynamics_grid(Frequency omega, const DynamicsGrid& g = {});

/// Ground state sampled on the dynamics grid.
RadialProfile dynamics_soliton(Frequency omega, const DynamicsGrid& g = {});

struct EvolveConfig {
  /// Diagnostics are recorded every this many steps, and after the last one.
  int record_every = 100;
  /// Field snapshots every this many records; 0 keeps none.
  int snapshot_every = 0;
  bool absorbing = true;
  double absorbing_fraction = 0.1;  ///< outer part of the domain with damping
  double absorbing_strength = 1.0;  ///< peak damping rate
  bool parallel = true;
  /// Reference soliton for orbit_distance; must share the field's grid.
  std::optional<RealRadialFunction> reference;
  /// Stop early once the orbit distance exceeds this.
  double stop_distance = std::numeric_limits<double>::infinity();
};

/// Default time step min(1e-3, h^2).
double default_time_step(const RadialGrid& grid);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> orbit_distance_series;  ///< empty without a reference
  std::vector<double> phase_series;           ///< unwrapped optimal phase
  std::vector<ComplexRadialField> field_snapshots;
  ComplexRadialField final_state;
};

/// Mass and energy of the discrete field, kinetic part through the sine transform.
double discrete_mass(const ComplexRadialField& f);
double discrete_energy(const ComplexRadialField& f);

/// Strang splitting: half nonlinear phase, exact sine-transform kinetic step,
/// half nonlinear phase. Throws NumericalBlowUp on non-finite values.
TrajectoryRecord evolve(const ComplexRadialField& state, double dt, long steps, const EvolveConfig& cfg = {});

enum class PerturbationKind { Amplitude, MassPreserving, Random };

std::string to_string(PerturbationKind k);

/// Amplitude: (1 + eps) Q. MassPreserving: (1 + eps)^{3/2} Q((1 + eps) r).
/// Random: Q + eps |Q|_{H^1} b with b a smooth radial bump of unit H^1 norm
/// drawn from the seed. Requires |eps| <= 0.1.
ComplexRadialField perturbed_soliton(const RadialProfile& q, double eps, PerturbationKind kind,
                                     std::uint64_t seed = 1);
ComplexRadialField perturbed_soliton(Frequency omega, double eps, PerturbationKind kind,
                                     std::uint64_t seed = 1, const DynamicsGrid& g = {});

struct ConservationReport {
  double mass_drift;    ///< max |M(t) - M(0)| / M(0)
  double energy_drift;  ///< max |E(t) - E(0)| / |E(0)|, absolute when E(0) = 0
};

ConservationReport conservation_report(const TrajectoryRecord& traj);

enum class DynamicStability { Stable, Unstable, Inconclusive };

std::string to_string(DynamicStability s);

struct ExperimentConfig {
  DynamicsGrid grid{1.0 / 8.0, 2.0};
  double dt = 0.01;
  int record_every = 50;
  double unstable_factor = 10.0;
  double stable_factor = 3.0;
  /// Initial distances below this fraction of |Q|_{H^1} are replaced by it.
  double noise_floor = 1e-5;
  std::uint64_t seed = 1;
  bool parallel_runs = true;
};

struct KindOutcome {
  PerturbationKind kind;
  double initial_distance;
  double max_distance;
  double growth;  ///< max_distance / max(initial_distance, floor)
  double exit_time;  ///< first time growth passed unstable_factor, or the horizon
  bool blew_up;
};

struct ExperimentVerdict {
  DynamicStability classification;
  std::vector<KindOutcome> runs;
  bool numerical_caveat = false;  ///< some run hit NumericalBlowUp
  std::optional<Stability> curve_classification;
  /// Dynamic verdict agrees with the slope classification.
  std::optional<bool> agrees_with_curve;
  std::string evidence;
};

/// Evolves the three perturbations of Q_omega up to the horizon and compares
/// the orbit distance with its initial value. The optional curve stamps the
/// slope classification onto the verdict.
ExperimentVerdict stability_experiment(Frequency omega, double eps, double horizon,
                                       const ExperimentConfig& cfg = {},
                                       const SolitonCurve* curve = nullptr);

}  // namespace cqnls
