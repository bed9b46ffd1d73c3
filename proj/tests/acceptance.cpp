// Acceptance run: one PASS/FAIL line per criterion at the published tolerances.
// Usage: acceptance [--known-red N]...  Exit status is nonzero when a
// criterion outside the known-red list fails.

#include <fmt/core.h>
#include <omp.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cqnls/collocation.hpp"
#include "cqnls/dynamics.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/io.hpp"
#include "cqnls/soliton_curve.hpp"
#include "cqnls/spectral.hpp"

using namespace cqnls;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

// Detail fragments are appended in order; a failing check marks the criterion red.
struct Checks {
  bool ok = true;
  std::vector<std::string> parts;

  void expect(bool cond, const std::string& what) {
    if (!cond) ok = false;
    parts.push_back((cond ? "" : "!") + what);
  }
  Outcome done() const {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
    return {ok, s};
  }
};

double mass_at(double w) { return evaluate(solve_ground_state(Frequency(w)).field).mass; }

std::vector<double> rq_of(const RadialProfile& q) {
  std::vector<double> v(q.values().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = q.grid().node(i) * q.values()[i];
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolitonCurve g_curve;
SolitonCurve g_fine;  // 2x refinement, 255 samples

// max |dK/domega - (3/2) M| / ((3/2) M) from three-point differences
double central_kinetic(const SolitonCurve& k) {
  const auto rep = check_identities(k);
  double worst = 0;
  for (std::size_t i = 0; i < rep.central_kinetic_residual.size(); ++i)
    worst = std::max(worst, std::abs(rep.central_kinetic_residual[i]) / (1.5 * k.points[i + 1].mass));
  return worst;
}

Outcome ground_states() {
  Checks c;
  double res = 0, poh = 0, decay = 0, p4 = 0;
  for (double w : {0.02, 0.05, 3.0 / 32.0, 0.13, 0.17}) {
    const auto q = solve_ground_state(Frequency(w));
    const auto r = evaluate(q.field);
    res = std::max(res, residual(q));
    poh = std::max(poh, std::abs(r.pohozaev) / r.kinetic);
    decay = std::max(decay, std::abs(q.decay_rate / std::sqrt(w) - 1));
    p4 = std::max(p4, std::abs(r.p4 / (4 * w * r.mass) - 1));
  }
  c.expect(res < 1e-6, fmt::format("residual {:.2e}", res));
  c.expect(poh < 1e-6, fmt::format("|I|/K {:.2e}", poh));
  c.expect(decay < 0.02, fmt::format("decay {:.2e}", decay));
  c.expect(p4 < 1e-5, fmt::format("p4/(4wM)-1 {:.2e}", p4));
  return c.done();
}

Outcome two_solvers() {
  Checks c;
  double worst = 0;
  for (double w : {0.02, 3.0 / 32.0, 0.17}) {
    const auto q = solve_ground_state(Frequency(w));
    const auto col = solve_collocation(Frequency(w), q.field);
    worst = std::max(worst, std::abs(col.report.mass / evaluate(q.field).mass - 1));
  }
  c.expect(worst < 1e-6, fmt::format("max mass mismatch {:.2e}", worst));
  return c.done();
}

Outcome identities() {
  Checks c;
  g_curve = trace_curve(default_samples(128));
  const auto rep = check_identities(g_curve);
  c.expect(rep.ok(), fmt::format("{} violations", rep.violations.size()));
  c.expect(rep.max_energy_relative < 1e-3 || rep.max_energy_absolute < 1e-6,
           fmt::format("dE rel {:.2e} abs {:.2e}", rep.max_energy_relative, rep.max_energy_absolute));
  c.expect(rep.max_kinetic_relative < 1e-3, fmt::format("dK rel {:.2e}", rep.max_kinetic_relative));
  // three-point differences are only second order on this layout; shown for reference
  g_fine = trace_curve(default_samples(255));
  const double k128 = central_kinetic(g_curve), k255 = central_kinetic(g_fine);
  c.parts.push_back(fmt::format("(three-point dK rel: 128 samples {:.1e}, 255 samples {:.1e})", k128, k255));
  return c.done();
}

Outcome constants() {
  Checks c;
  const auto& k = g_curve;
  const double rel = std::abs(k.rho / (64.0 / 9.0 * k.d0 * k.d0) - 1);
  c.expect(rel < 1e-3, fmt::format("rho vs (64/9)d0^2 {:.1e}", rel));
  const double floor = 4 / (3 * std::sqrt(3.0)) * k.rho;
  c.expect(floor <= k.m0 && k.m0 <= k.rho, fmt::format("{:.4f} <= m0 {:.4f} <= {:.4f}", floor, k.m0, k.rho));
  c.expect(std::abs(k.energy_at_zero) < 1e-5 * k.kinetic_at_zero,
           fmt::format("E/K at omega_E=0 {:.1e}", k.energy_at_zero / k.kinetic_at_zero));
  const auto best = std::min_element(k.points.begin(), k.points.end(),
                                     [](const auto& a, const auto& b) { return a.weinstein < b.weinstein; });
  const auto i = static_cast<std::size_t>(best - k.points.begin());
  const bool within = i > 0 && i + 1 < k.points.size() &&
                      k.points[i - 1].omega.value() < k.omega_zero_energy.value() &&
                      k.omega_zero_energy.value() < k.points[i + 1].omega.value();
  c.expect(within, fmt::format("Weinstein min at sample {:.5f}", best->omega.value()));
  // [DERIVED] fixtures
  const bool frozen = std::abs(k.d0 / 5.814880338559 - 1) < 1e-9 && std::abs(k.rho / 240.44681494 - 1) < 1e-9 &&
                      std::abs(k.m0 / 189.45915725 - 1) < 1e-9 && std::abs(k.omega_star.value() - 0.0255453) < 2e-6;
  c.expect(frozen, fmt::format("d0 {:.9f} rho {:.6f} m0 {:.6f} omega* {:.7f}", k.d0, k.rho, k.m0,
                               k.omega_star.value()));
  return c.done();
}

int monotonicity_violations(const SolitonCurve& k) {
  int bad = 0;
  const double ws = k.omega_star.value();
  for (std::size_t i = 1; i < k.points.size(); ++i) {
    const auto& a = k.points[i - 1];
    const auto& b = k.points[i];
    if (b.omega.value() <= ws && !(b.mass < a.mass)) ++bad;
    if (a.omega.value() >= ws && !(b.mass > a.mass)) ++bad;
  }
  return bad;
}

Outcome monotonicity() {
  Checks c;
  const int coarse = monotonicity_violations(g_curve);
  const int refined = monotonicity_violations(g_fine);
  c.expect(coarse == 0 && refined == 0, fmt::format("violations 128: {}, 255: {}", coarse, refined));
  std::vector<double> found;
  for (auto [lo, hi] : {std::pair{0.008, 0.014}, std::pair{0.02, 0.03}, std::pair{0.04, 0.07}})
    found.push_back(find_critical_frequency(g_curve, lo, hi).omega_star.value());
  const double spread = *std::max_element(found.begin(), found.end()) - *std::min_element(found.begin(), found.end());
  c.expect(spread < 1e-5, fmt::format("omega* spread over brackets {:.1e}", spread));
  return c.done();
}

Outcome normalized() {
  Checks c;
  const auto& k = g_curve;
  const auto n0 = normalized_solutions(k.m0 / 2, k);
  const auto n1 = normalized_solutions(k.m0, k);
  const auto n2 = normalized_solutions(2 * k.m0, k);
  c.expect(n0.size() == 0 && n1.size() == 1 && n2.size() == 2,
           fmt::format("counts {}, {}, {}", n0.size(), n1.size(), n2.size()));
  double err = 0;
  for (auto w : n1) err = std::max(err, std::abs(mass_at(w.value()) / k.m0 - 1));
  for (auto w : n2) err = std::max(err, std::abs(mass_at(w.value()) / (2 * k.m0) - 1));
  c.expect(err < 1e-4, fmt::format("round-trip {:.1e}", err));
  return c.done();
}

Outcome variational() {
  Checks c;
  const auto& k = g_curve;
  const auto at_rho = variational_values(k.rho, k);
  const bool zero = std::holds_alternative<double>(at_rho.d_m) && std::abs(std::get<double>(at_rho.d_m)) < 1e-9;
  c.expect(zero, "d_m = 0 at rho");
  const auto big = variational_values(1.5 * k.rho, k);
  bool match = false;
  if (std::holds_alternative<double>(big.d_m) && std::holds_alternative<double>(big.d_m_i)) {
    const double a = std::get<double>(big.d_m), b = std::get<double>(big.d_m_i);
    match = a < 0 && std::abs(a - b) <= 1e-4 * std::abs(a);
    c.parts.push_back(fmt::format("d_m(1.5 rho) {:.7f}", a));
  }
  c.expect(match, "d_m = d_m^I < 0 at 1.5 rho");
  const auto small = variational_values(0.9 * 4 / (3 * std::sqrt(3.0)) * k.rho, k);
  c.expect(std::holds_alternative<Unbounded>(small.d_m_i), "Unbounded below the floor");
  const auto mid = variational_values(1.2 * k.rho, k);
  const auto flow = gradient_flow_oracle(1.2 * k.rho);
  const double branch = std::holds_alternative<double>(mid.d_m_i) ? std::get<double>(mid.d_m_i) : NAN;
  const double rel = std::abs(flow.energy / branch - 1);
  c.expect(rel < 1e-2, fmt::format("gradient flow vs branch {:.1e}", rel));
  return c.done();
}

Outcome spectral() {
  Checks c;
  double worst_minus = 0, worst_cos = 1, worst_ls = 0, top_plus = -INFINITY;
  for (double w : {0.02, 0.05, 3.0 / 32.0, 0.13, 0.17}) {
    const auto q = solve_ground_state(Frequency(w));
    top_plus = std::max(top_plus, lowest_eigenpairs(build_operator(q, OperatorKind::LPlus), 1)[0].value);
    const auto m = lowest_eigenpairs(build_operator(q, OperatorKind::LMinus), 1)[0];
    worst_minus = std::max(worst_minus, std::abs(m.value) / w);
    worst_cos = std::min(worst_cos, cosine_similarity(m.vector, rq_of(q)));
    const auto ls = rayleigh_lambda_star(q);
    worst_ls = std::max(worst_ls, std::abs(ls.rayleigh / ls.formula - 1));
  }
  c.expect(top_plus < 0, fmt::format("max L+ ground {:.3e}", top_plus));
  c.expect(worst_minus < 1e-4, fmt::format("|L- ground|/omega {:.1e}", worst_minus));
  c.expect(worst_cos > 0.999, fmt::format("cos(L- mode, rQ) {:.7f}", worst_cos));
  c.expect(worst_ls < 1e-5, fmt::format("lambda* formula vs Rayleigh {:.1e}", worst_ls));
  int positive = 0;
  double first = NAN;
  for (const auto& p : g_curve.points)
    if (p.lambda_star >= 0) {
      if (positive++ == 0) first = p.omega.value();
    }
  c.expect(positive == 0, fmt::format("lambda* >= 0 at {} of {} samples (from omega = {:.4f})", positive,
                                      g_curve.points.size(), first));
  return c.done();
}

Outcome dynamics() {
  Checks c;
  const Frequency w(3.0 / 32.0);
  const auto q = dynamics_soliton(w);
  EvolveConfig cfg;
  cfg.reference = q.field;
  const auto tr = evolve(perturbed_soliton(q, 0.0, PerturbationKind::Amplitude), 1e-3, 20000, cfg);
  double d = 0;
  for (double x : tr.orbit_distance_series) d = std::max(d, x);
  const auto cons = conservation_report(tr);
  c.expect(d < 1e-5 * h1_norm(q.field), fmt::format("orbit distance {:.1e} |Q|", d / h1_norm(q.field)));
  c.expect(cons.mass_drift < 1e-10, fmt::format("mass drift {:.1e}", cons.mass_drift));

  const auto start = perturbed_soliton(q, 0.05, PerturbationKind::MassPreserving);
  std::vector<double> drift;
  for (double dt : {0.02, 0.01, 0.005}) {
    EvolveConfig e;
    e.absorbing = false;
    e.record_every = 1;
    drift.push_back(conservation_report(evolve(start, dt, std::lround(2.0 / dt), e)).energy_drift);
  }
  const double o1 = std::log2(drift[0] / drift[1]), o2 = std::log2(drift[1] / drift[2]);
  c.expect(std::abs(o1 - 2) < 0.2 && std::abs(o2 - 2) < 0.2, fmt::format("energy order {:.2f}, {:.2f}", o1, o2));

  const double ws = g_curve.omega_star.value();
  for (auto [omega, expected] : {std::pair{ws / 3, DynamicStability::Unstable},
                                 std::pair{(ws + 3.0 / 16.0) / 2, DynamicStability::Stable}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto v = stability_experiment(Frequency(omega), 0.01, 50.0 / omega, {}, &g_curve);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(v.classification == expected && secs < 600,
             fmt::format("omega {:.5f}: {} in {:.0f} s", omega, to_string(v.classification), secs));
  }
  return c.done();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CQNLS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_tree(const fs::path& a, const fs::path& b) {
  int files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    if (slurp(e.path()) != slurp(b / e.path().filename())) return false;
  }
  return files > 0;
}

Outcome determinism() {
  Checks c;
  const auto root = fs::temp_directory_path() / "cqnls_acceptance";
  fs::remove_all(root);
  for (const std::string args : {"ground-state --omega 0.07", "spectrum --omega 0.07 --modes 3",
                                 "evolve --omega 0.1 --eps 0.01 --kind random --seed 9 --time 1"}) {
    const auto a = root / "a", b = root / "b";
    const bool ran = run_cli(args + " --out " + a.string()) == 0 && run_cli(args + " --out " + b.string()) == 0;
    c.expect(ran && same_tree(a, b), args.substr(0, args.find(' ')));
    fs::remove_all(a);
    fs::remove_all(b);
  }
  // curve export across thread counts
  const auto samples = default_samples(32, 0.01, 0.17);
  io::Metadata meta{"curve", "0", 1, {}};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  io::write_curve_csv(root / "one.csv", meta, trace_points(samples));
  omp_set_num_threads(std::max(2, saved));
  io::write_curve_csv(root / "many.csv", meta, trace_points(samples));
  omp_set_num_threads(saved);
  c.expect(slurp(root / "one.csv") == slurp(root / "many.csv"), "curve CSV, 1 vs many threads");
  fs::remove_all(root);
  return c.done();
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--known-red") known_red.insert(std::atoi(argv[++i]));

  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "ground-state validity", 5, ground_states},
      {2, "two-solver agreement", 30, two_solvers},
      {3, "curve identities", 120, identities},
      {4, "constants", 1e9, constants},
      {5, "monotonicity", 1e9, monotonicity},
      {6, "normalized solutions", 1e9, normalized},
      {7, "variational values", 300, variational},
      {8, "spectral structure", 60, spectral},
      {9, "dynamics", 1e9, dynamics},
      {10, "determinism", 1e9, determinism},
  };

  int unexpected = 0;
  for (const auto& cr : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget) {
      o.pass = false;
      o.detail += fmt::format("; !over budget {:.0f} s", cr.budget);
    }
    const bool red_ok = !o.pass && known_red.count(cr.id);
    if (!o.pass && !red_ok) ++unexpected;
    fmt::print("criterion {:2d} {:<22} {} ({:.1f} s) {}{}\n", cr.id, cr.name, o.pass ? "PASS" : "FAIL", secs,
               o.detail, red_ok ? " [known red]" : "");
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
