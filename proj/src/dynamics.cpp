#include "cqnls/dynamics.hpp"

#include <fftw3.h>
#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>

#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/kernels.hpp"

namespace cqnls {

namespace {

using cplx = std::complex<double>;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place DST-I of the real and imaginary parts of a complex array.
class SineTransform {
 public:
  explicit SineTransform(std::vector<cplx>& data) {
    const int n = static_cast<int>(data.size());
    const fftw_r2r_kind kinds[] = {FFTW_RODFT00};
    auto* p = reinterpret_cast<double*>(data.data());
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_many_r2r(1, &n, 2, p, nullptr, 2, 1, p, nullptr, 2, 1, kinds, FFTW_ESTIMATE);
    if (!plan_) throw Error(ErrorKind::InvalidArgument, "could not plan the sine transform");
  }
  ~SineTransform() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  void run() { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

/// Eigenvalues (pi k / L)^2 of -d^2/dr^2 with Dirichlet ends at 0 and L = (n+1) h.
std::vector<double> sine_symbols(const RadialGrid& g) {
  const std::size_t n = g.size();
  const double len = static_cast<double>(n + 1) * g.spacing();
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = std::numbers::pi * static_cast<double>(k + 1) / len;
    s[k] = kk * kk;
  }
  return s;
}

std::vector<double> inverse_radii(const RadialGrid& g) {
  std::vector<double> inv(g.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / g.node(i);
  return inv;
}

void require_finite(const std::vector<cplx>& v, double t) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::NumericalBlowUp, fmt::format("non-finite field at t = {:.17g}", t));
}

double kinetic_from_transform(const std::vector<cplx>& vhat, const std::vector<double>& symbols, double h) {
  // Parseval for DST-I: h sum |v|^2 = h / (2 (n + 1)) sum |vhat|^2
  double s = 0.0;
  for (std::size_t k = 0; k < vhat.size(); ++k) s += symbols[k] * std::norm(vhat[k]);
  return 4.0 * std::numbers::pi * h * s / (2.0 * static_cast<double>(vhat.size() + 1));
}

struct Potentials {
  double p4 = 0.0;
  double p6 = 0.0;
  double mass = 0.0;
};

Potentials potentials(const std::vector<cplx>& v, const std::vector<double>& inv_r, double h) {
  Potentials p;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double a = std::norm(v[i]);
    const double u2 = a * inv_r[i] * inv_r[i];
    p.mass += a;
    p.p4 += a * u2;
    p.p6 += a * u2 * u2;
  }
  const double w = 4.0 * std::numbers::pi * h;
  p.mass *= w;
  p.p4 *= w;
  p.p6 *= w;
  return p;
}

}  // namespace

ComplexRadialField::ComplexRadialField(RadialGrid g, std::vector<std::complex<double>> v, double t)
    : grid(std::move(g)), v_values(std::move(v)), time(t) {
  if (v_values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  for (const auto& z : v_values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::InvalidField, "complex field has non-finite samples");
}

ComplexRadialField ComplexRadialField::from_u(const ComplexRadialFunction& u, double t) {
  std::vector<cplx> v(u.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = u.grid.node(i) * u.values[i];
  return {u.grid, std::move(v), t};
}

ComplexRadialFunction ComplexRadialField::u() const {
  // nodes start at r = h, so the division never meets the origin
  std::vector<cplx> out(v_values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v_values[i] / grid.node(i);
  return {grid, std::move(out)};
}

ComplexRadialField ComplexRadialField::conjugate() const {
  std::vector<cplx> c(v_values.size());
  std::transform(v_values.begin(), v_values.end(), c.begin(), [](cplx z) { return std::conj(z); });
  return {grid, std::move(c), time};
}

RadialProfile dynamics_soliton(Frequency omega, const DynamicsGrid& g) {
  if (!(g.spacing > 0.0) || !(g.radius_factor >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "invalid dynamics grid");
  ShootingConfig cfg;
  const auto base = solve_ground_state(omega, cfg);
  auto n = static_cast<std::size_t>(std::ceil(g.radius_factor * base.grid().r_max() / g.spacing - 1e-9));
  // the sine transform has length n + 1; keep it 5-smooth for FFTW
  auto smooth = [](std::size_t m) {
    for (std::size_t p : {2, 3, 5})
      while (m % p == 0) m /= p;
    return m == 1;
  };
  while (!smooth(n + 1)) ++n;
  return solve_ground_state(omega, cfg, RadialGrid(static_cast<double>(n) * g.spacing, n));
}

RadialGrid dynamics_grid(Frequency omega, const DynamicsGrid& g) { return dynamics_soliton(omega, g).grid(); }

double default_time_step(const RadialGrid& grid) {
  return std::min(1e-3, grid.spacing() * grid.spacing());
}

double discrete_mass(const ComplexRadialField& f) {
  return potentials(f.v_values, inverse_radii(f.grid), f.grid.spacing()).mass;
}

double discrete_energy(const ComplexRadialField& f) {
  const double h = f.grid.spacing();
  std::vector<cplx> work = f.v_values;
  SineTransform dst(work);
  dst.run();
  const double k = kinetic_from_transform(work, sine_symbols(f.grid), h);
  const auto p = potentials(f.v_values, inverse_radii(f.grid), h);
  return 0.5 * k - 0.25 * p.p4 + p.p6 / 6.0;
}

TrajectoryRecord evolve(const ComplexRadialField& state, double dt, long steps, const EvolveConfig& cfg) {
  if (!(dt > 0.0) || steps < 0) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  if (cfg.record_every <= 0) throw Error(ErrorKind::InvalidArgument, "record_every must be positive");
  const auto& grid = state.grid;
  if (cfg.reference && !(cfg.reference->grid == grid))
    throw Error(ErrorKind::GridMismatch, "reference soliton is on a different grid");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto inv_r = inverse_radii(grid);
  const auto symbols = sine_symbols(grid);

  std::vector<cplx> propagator(n);
  const double norm = 1.0 / (2.0 * static_cast<double>(n + 1));
  for (std::size_t k = 0; k < n; ++k) propagator[k] = std::polar(norm, -symbols[k] * dt);

  std::vector<double> damping;
  if (cfg.absorbing) {
    damping.assign(n, 1.0);
    const double r_max = grid.r_max();
    const double start = (1.0 - cfg.absorbing_fraction) * r_max;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid.node(i);
      if (r <= start) continue;
      const double s = (r - start) / (r_max - start);
      damping[i] = std::exp(-0.5 * dt * cfg.absorbing_strength * s * s);  // per half step
    }
  }

  std::vector<cplx> v = state.v_values;
  std::vector<cplx> work(n);
  SineTransform dst(v);
  SineTransform dst_work(work);

  auto half_nonlinear = [&] {
    if (cfg.parallel)
      kernels::parallel::nonlinear_phase(v, inv_r, 0.5 * dt, damping);
    else
      kernels::serial::nonlinear_phase(v, inv_r, 0.5 * dt, damping);
  };
  auto kinetic = [&] {
    dst.run();
    if (cfg.parallel)
      kernels::parallel::pointwise_multiply(v, propagator);
    else
      kernels::serial::pointwise_multiply(v, propagator);
    dst.run();
  };

  TrajectoryRecord rec{{}, {}, {}, {}, {}, {}, state};
  double last_phase = 0.0;
  int records = 0;
  auto record = [&](double t) {
    require_finite(v, t);
    work = v;
    dst_work.run();
    const auto p = potentials(v, inv_r, h);
    const double k = kinetic_from_transform(work, symbols, h);
    rec.times.push_back(t);
    rec.mass_series.push_back(p.mass);
    rec.energy_series.push_back(0.5 * k - 0.25 * p.p4 + p.p6 / 6.0);
    ComplexRadialField f(grid, v, t);
    if (cfg.reference) {
      const auto od = orbit_distance_with_phase(f.u(), *cfg.reference);
      double phase = od.phase;
      if (!rec.phase_series.empty()) {
        // unwrap against the previous record
        const double two_pi = 2.0 * std::numbers::pi;
        phase = last_phase + std::remainder(od.phase - last_phase, two_pi);
      }
      last_phase = phase;
      rec.orbit_distance_series.push_back(od.distance);
      rec.phase_series.push_back(phase);
    }
    if (cfg.snapshot_every > 0 && records % cfg.snapshot_every == 0) rec.field_snapshots.push_back(f);
    ++records;
    return rec.orbit_distance_series.empty() ? 0.0 : rec.orbit_distance_series.back();
  };

  const double t0 = state.time;
  record(t0);
  long done = 0;
  while (done < steps) {
    const long block = std::min<long>(cfg.record_every, steps - done);
    for (long s = 0; s < block; ++s) {
      half_nonlinear();
      kinetic();
      half_nonlinear();
    }
    done += block;
    const double dist = record(t0 + static_cast<double>(done) * dt);
    if (dist > cfg.stop_distance) break;
  }
  rec.final_state = ComplexRadialField(grid, std::move(v), rec.times.back());
  return rec;
}

std::string to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::Amplitude: return "Amplitude";
    case PerturbationKind::MassPreserving: return "MassPreserving";
    case PerturbationKind::Random: return "Random";
  }
  return "?";
}

ComplexRadialField perturbed_soliton(const RadialProfile& q, double eps, PerturbationKind kind,
                                     std::uint64_t seed) {
  if (!(std::abs(eps) <= 0.1)) throw Error(ErrorKind::PerturbationOutOfRange, "|eps| must not exceed 0.1");
  const auto& g = q.grid();
  const std::size_t n = g.size();
  std::vector<double> u;
  if (eps == 0.0) {
    u = q.values();
  } else {
    switch (kind) {
      case PerturbationKind::Amplitude:
        u = q.values();
        for (double& x : u) x *= 1.0 + eps;
        break;
      case PerturbationKind::MassPreserving:
        u = scale(q.field, 1.0 + eps).values;
        break;
      case PerturbationKind::Random: {
        std::mt19937_64 rng(seed);
        auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
        std::vector<double> bump(n, 0.0);
        const double reach = q.front_radius + 5.0 / std::sqrt(q.omega.value());
        for (int j = 0; j < 4; ++j) {
          const double center = reach * uniform();
          const double width = 1.0 + 2.0 * uniform();
          const double amp = 2.0 * uniform() - 1.0;
          for (std::size_t i = 0; i < n; ++i) {
            const double z = (g.node(i) - center) / width;
            // even in r about the origin so the bump stays smooth there
            const double zm = (g.node(i) + center) / width;
            bump[i] += amp * (std::exp(-z * z) + std::exp(-zm * zm));
          }
        }
        const RealRadialFunction b(g, bump);
        const double scale_b = eps * h1_norm(q.field) / h1_norm(b);
        u = q.values();
        for (std::size_t i = 0; i < n; ++i) u[i] += scale_b * bump[i];
        break;
      }
    }
  }
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = g.node(i) * u[i];
  return {g, std::move(v), 0.0};
}

ComplexRadialField perturbed_soliton(Frequency omega, double eps, PerturbationKind kind, std::uint64_t seed,
                                     const DynamicsGrid& g) {
  return perturbed_soliton(dynamics_soliton(omega, g), eps, kind, seed);
}

ConservationReport conservation_report(const TrajectoryRecord& traj) {
  if (traj.times.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  const double m0 = traj.mass_series.front();
  const double e0 = traj.energy_series.front();
  ConservationReport r{0.0, 0.0};
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double dm = std::abs(traj.mass_series[i] - m0);
    const double de = std::abs(traj.energy_series[i] - e0);
    r.mass_drift = std::max(r.mass_drift, m0 != 0.0 ? dm / m0 : dm);
    r.energy_drift = std::max(r.energy_drift, e0 != 0.0 ? de / std::abs(e0) : de);
  }
  return r;
}

std::string to_string(DynamicStability s) {
  switch (s) {
    case DynamicStability::Stable: return "Stable";
    case DynamicStability::Unstable: return "Unstable";
    case DynamicStability::Inconclusive: return "Inconclusive";
  }
  return "?";
}

ExperimentVerdict stability_experiment(Frequency omega, double eps, double horizon, const ExperimentConfig& cfg,
                                       const SolitonCurve* curve) {
  const double w = omega.value();
  if (!(horizon >= 50.0 / w * (1.0 - 1e-12)))
    throw Error(ErrorKind::InvalidArgument, "horizon must be at least 50 / omega");
  if (!(cfg.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  const auto q = dynamics_soliton(omega, cfg.grid);
  const double norm_q = h1_norm(q.field);
  const double floor = cfg.noise_floor * norm_q;
  const long steps = static_cast<long>(std::ceil(horizon / cfg.dt - 1e-9));

  const PerturbationKind kinds[] = {PerturbationKind::Amplitude, PerturbationKind::MassPreserving,
                                    PerturbationKind::Random};
  std::vector<KindOutcome> runs(3);
#pragma omp parallel for schedule(static, 1) if (cfg.parallel_runs)
  for (int k = 0; k < 3; ++k) {
    const auto init = perturbed_soliton(q, eps, kinds[k], cfg.seed);
    const double d0 = orbit_distance(init.u(), q.field);
    const double base = std::max(d0, floor);
    EvolveConfig ec;
    ec.record_every = cfg.record_every;
    ec.reference = q.field;
    ec.parallel = !cfg.parallel_runs;
    ec.stop_distance = cfg.unstable_factor * base;
    KindOutcome out{kinds[k], d0, d0, 1.0, horizon, false};
    try {
      const auto tr = evolve(init, cfg.dt, steps, ec);
      out.max_distance = *std::max_element(tr.orbit_distance_series.begin(), tr.orbit_distance_series.end());
      out.exit_time = tr.times.back();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalBlowUp) throw;
      out.blew_up = true;
      out.max_distance = std::numeric_limits<double>::infinity();
    }
    out.growth = out.max_distance / base;
    runs[static_cast<std::size_t>(k)] = out;
  }

  ExperimentVerdict v;
  v.runs = runs;
  bool any_unstable = false, all_stable = true;
  for (const auto& r : runs) {
    if (r.blew_up) v.numerical_caveat = true;
    if (r.blew_up || r.growth > cfg.unstable_factor) any_unstable = true;
    if (!(r.growth < cfg.stable_factor)) all_stable = false;
  }
  if (any_unstable) {
    v.classification = DynamicStability::Unstable;
    v.evidence = v.numerical_caveat ? "numerical blow-up" : fmt::format("orbit distance grew past {}x", cfg.unstable_factor);
  } else if (all_stable) {
    v.classification = DynamicStability::Stable;
    v.evidence = fmt::format("orbit distance stayed below {}x (radial perturbations only)", cfg.stable_factor);
  } else {
    v.classification = DynamicStability::Inconclusive;
    v.evidence = "orbit distance between the stable and unstable thresholds";
  }
  if (curve) {
    const auto c = classify_stability(omega, *curve);
    v.curve_classification = c.classification;
    if (v.classification != DynamicStability::Inconclusive && c.classification != Stability::Marginal)
      v.agrees_with_curve = (v.classification == DynamicStability::Stable) == (c.classification == Stability::Stable);
  }
  return v;
}

}  // namespace cqnls
