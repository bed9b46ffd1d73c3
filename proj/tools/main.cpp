// cqnls: batch front end. Every subcommand writes into its own output
// directory and prints a short summary on stdout.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cqnls/collocation.hpp"
#include "cqnls/dynamics.hpp"
#include "cqnls/error.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/ground_state.hpp"
#include "cqnls/io.hpp"
#include "cqnls/soliton_curve.hpp"
#include "cqnls/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cqnls;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDomain = 2, kConvergence = 3 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ShootingBracketFailure:
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::DecayFitFailure:
    case ErrorKind::OracleDidNotConverge:
    case ErrorKind::EigenConvergenceFailure:
    case ErrorKind::NumericalBlowUp:
      return kConvergence;
    default:
      return kDomain;
  }
}

// Raised by a command whose own consistency check fails.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CurveOptions {
  std::size_t samples = 128;
  double omega_min = 0.002;
  double omega_max = 0.18;

  void attach(CLI::App* sub) {
    sub->add_option("--samples", samples, "curve samples")->capture_default_str()->check(CLI::Range(8, 4096));
    sub->add_option("--omega-min", omega_min, "lower end of the traced range")->capture_default_str();
    sub->add_option("--omega-max", omega_max, "upper end of the traced range")->capture_default_str();
  }

  void validate() const {
    Frequency lo(omega_min), hi(omega_max);
    if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "--omega-min must be below --omega-max");
  }

  SolitonCurve trace() const { return trace_curve(default_samples(samples, omega_min, omega_max)); }

  void describe(io::Metadata& meta) const {
    meta.add("samples", std::to_string(samples));
    meta.add("omega_min", io::number(omega_min));
    meta.add("omega_max", io::number(omega_max));
    meta.add("grid_h", io::number(kDefaultSpacing));
  }
};

struct Run {
  CLI::App* sub = nullptr;
  std::string out;
  std::string config;
  bool svg = false;
  std::uint64_t seed = 1;
  int threads = 0;

  // Hash of every resolved option except the output location.
  std::string config_hash() const {
    std::istringstream lines(sub->config_to_str(true, false));
    std::string line, canonical = sub->get_name() + "\n";
    while (std::getline(lines, line)) {
      if (line.rfind("out=", 0) == 0 || line.rfind("config=", 0) == 0 || line.rfind("threads=", 0) == 0) continue;
      canonical += line + "\n";
    }
    return io::fnv1a_hex(canonical);
  }

  io::Metadata metadata() const { return {sub->get_name(), config_hash(), seed, {}}; }

  fs::path path(const std::string& name) const { return fs::path(out) / name; }
};

void add_common(CLI::App* sub, Run& run) {
  run.sub = sub;
  run.out = "out/" + sub->get_name();
  sub->add_option("--out", run.out, "output directory")->capture_default_str();
  sub->add_option("--config", run.config, "key=value file; flags given on the command line win");
  sub->add_flag("--svg", run.svg, "also write an SVG plot");
  sub->add_option("--seed", run.seed, "seed for random perturbations")->capture_default_str();
  sub->add_option("--threads", run.threads, "OpenMP threads, 0 keeps the runtime default")->capture_default_str();
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------- commands

struct GroundStateCmd {
  double omega = 3.0 / 32.0;
  double grid_h = kDefaultSpacing;

  int run(const Run& r) const {
    Frequency w(omega);
    ShootingConfig cfg;
    cfg.grid_spacing = grid_h;
    cfg.validate();
    const RadialProfile q = solve_ground_state(w, cfg);
    const FunctionalReport rep = evaluate(q.field);

    io::Metadata meta = r.metadata();
    meta.add("omega", io::number(omega));
    meta.add_grid(q.grid());
    io::write_profile_csv(r.path("profile.csv"), meta, q);

    json body = io::to_json(rep);
    body["omega"] = omega;
    body["amplitude"] = q.amplitude;
    body["plateau_offset"] = q.plateau_offset;
    body["residual"] = residual(q);
    body["decay_rate"] = q.decay_rate;
    body["decay_rate_expected"] = std::sqrt(omega);
    body["pohozaev_relative"] = rep.pohozaev / rep.kinetic;
    body["front_radius"] = q.front_radius;
    io::write_json(r.path("report.json"), meta, body);
    if (r.svg) {
      std::vector<double> x(q.grid().nodes().begin(), q.grid().nodes().end());
      io::write_svg_plot(r.path("profile.svg"), x, q.values(), fmt::format("Q at omega = {}", io::number(omega)),
                         "r", "Q");
    }
    body.erase("metadata");
    print_json(body);
    return kOk;
  }
};

struct CurveCmd {
  CurveOptions curve;

  int run(const Run& r) const {
    curve.validate();
    const SolitonCurve c = curve.trace();
    const IdentityReport ids = check_identities(c);

    io::Metadata meta = r.metadata();
    curve.describe(meta);
    io::write_curve_csv(r.path("curve.csv"), meta, c.points);
    json summary = io::summary_json(c);
    io::write_json(r.path("summary.json"), meta, summary);

    json checks{{"energy_slope_relative", ids.max_energy_relative},
                {"energy_slope_absolute", ids.max_energy_absolute},
                {"kinetic_slope_relative", ids.max_kinetic_relative},
                {"algebraic", ids.max_algebraic},
                {"violations", ids.violations.size()}};
    io::write_json(r.path("identities.json"), meta, checks);
    if (r.svg) {
      std::vector<double> w, m;
      for (const auto& p : c.points) {
        w.push_back(p.omega.value());
        m.push_back(p.mass);
      }
      io::write_svg_plot(r.path("mass.svg"), w, m, "mass curve", "omega", "M(Q)");
    }
    summary["identity_violations"] = ids.violations.size();
    print_json(summary);
    return kOk;
  }
};

struct CriticalCmd {
  CurveOptions curve;
  std::optional<double> bracket_lo, bracket_hi;
  double tolerance = 1e-6;

  int run(const Run& r) const {
    curve.validate();
    if (bracket_lo.has_value() != bracket_hi.has_value())
      throw Error(ErrorKind::InvalidArgument, "--bracket-lo and --bracket-hi go together");
    const SolitonCurve c = curve.trace();
    const CriticalPoint cp = bracket_lo ? find_critical_frequency(c, *bracket_lo, *bracket_hi, tolerance)
                                        : find_critical_frequency(c, tolerance);
    io::Metadata meta = r.metadata();
    curve.describe(meta);
    json body{{"omega_star", cp.omega_star.value()}, {"m0", cp.m0}, {"evaluations", cp.evaluations}};
    io::write_json(r.path("critical.json"), meta, body);
    print_json(body);
    return kOk;
  }
};

struct SpectrumCmd {
  double omega = 3.0 / 32.0;
  double grid_h = 1.0 / 128.0;
  std::size_t modes = 4;

  int run(const Run& r) const {
    Frequency w(omega);
    if (modes < 1 || modes > 8) throw Error(ErrorKind::InvalidArgument, "--modes must lie in [1, 8]");
    ShootingConfig cfg;
    cfg.grid_spacing = grid_h;
    cfg.validate();
    const RadialProfile q = solve_ground_state(w, cfg);

    std::vector<std::pair<OperatorKind, std::vector<EigenPair>>> spectra;
    for (OperatorKind k : {OperatorKind::LPlus, OperatorKind::LMinus})
      spectra.emplace_back(k, lowest_eigenpairs(build_operator(q, k), modes));

    std::vector<double> rq(q.values().size());
    for (std::size_t i = 0; i < rq.size(); ++i) rq[i] = q.grid().node(i) * q.values()[i];
    const LambdaStar ls = rayleigh_lambda_star(q);

    io::Metadata meta = r.metadata();
    meta.add("omega", io::number(omega));
    meta.add_grid(q.grid());
    io::write_spectrum_csv(r.path("spectrum.csv"), meta, omega, spectra);
    io::write_mode_csv(r.path("mode_lplus.csv"), meta, q.grid(), spectra[0].second.front());
    io::write_mode_csv(r.path("mode_lminus.csv"), meta, q.grid(), spectra[1].second.front());

    json body;
    body["omega"] = omega;
    for (const auto& [kind, pairs] : spectra) {
      json vals = json::array();
      for (const auto& p : pairs) vals.push_back(p.value);
      body[to_string(kind)] = vals;
    }
    body["lminus_ground_cosine_rq"] = std::abs(cosine_similarity(spectra[1].second.front().vector, rq));
    body["lplus_ground_cosine_rq"] = std::abs(cosine_similarity(spectra[0].second.front().vector, rq));
    body["lambda_star_formula"] = ls.formula;
    body["lambda_star_rayleigh"] = ls.rayleigh;
    io::write_json(r.path("spectrum.json"), meta, body);
    if (r.svg) {
      std::vector<double> x(q.grid().nodes().begin(), q.grid().nodes().end());
      io::write_svg_plot(r.path("mode_lplus.svg"), x, spectra[0].second.front().vector, "L+ ground mode", "r",
                         "r u");
    }
    print_json(body);
    return kOk;
  }
};

PerturbationKind parse_kind(const std::string& s) {
  if (s == "amplitude") return PerturbationKind::Amplitude;
  if (s == "mass-preserving") return PerturbationKind::MassPreserving;
  if (s == "random") return PerturbationKind::Random;
  throw Error(ErrorKind::InvalidArgument, "unknown perturbation kind " + s);
}

struct EvolveCmd {
  double omega = 3.0 / 32.0;
  double eps = 0.0;
  std::string kind = "amplitude";
  double grid_h = 1.0 / 16.0;
  double radius_factor = 2.0;
  double dt = 1e-3;
  double time = 20.0;
  int record_every = 100;
  bool no_absorb = false;

  int run(const Run& r) const {
    Frequency w(omega);
    const PerturbationKind pk = parse_kind(kind);
    if (!(dt > 0) || !(time > 0) || record_every < 1)
      throw Error(ErrorKind::InvalidArgument, "--dt, --time and --record-every must be positive");
    if (std::abs(eps) > 0.1) throw Error(ErrorKind::PerturbationOutOfRange, "|eps| must not exceed 0.1");
    const DynamicsGrid g{grid_h, radius_factor};
    const RadialProfile q = dynamics_soliton(w, g);
    const ComplexRadialField start = perturbed_soliton(q, eps, pk, r.seed);

    EvolveConfig cfg;
    cfg.record_every = record_every;
    cfg.absorbing = !no_absorb;
    cfg.reference = q.field;
    const long steps = std::lround(time / dt);
    const TrajectoryRecord tr = evolve(start, dt, steps, cfg);
    const ConservationReport cons = conservation_report(tr);

    io::Metadata meta = r.metadata();
    meta.add("omega", io::number(omega));
    meta.add("eps", io::number(eps));
    meta.add("kind", kind);
    meta.add("dt", io::number(dt));
    meta.add_grid(q.grid());
    io::write_trajectory_csv(r.path("trajectory.csv"), meta, tr);
    io::write_snapshot_csv(r.path("final.csv"), meta, tr.final_state);

    const double norm = h1_norm(q.field);
    double max_distance = 0.0;
    for (double d : tr.orbit_distance_series) max_distance = std::max(max_distance, d);
    json body{{"omega", omega},
              {"steps", steps},
              {"final_time", tr.final_state.time},
              {"mass_drift", cons.mass_drift},
              {"energy_drift", cons.energy_drift},
              {"max_orbit_distance_relative", max_distance / norm},
              {"final_phase", tr.phase_series.back()}};
    io::write_json(r.path("evolve.json"), meta, body);
    if (r.svg) {
      std::vector<double> d;
      for (double x : tr.orbit_distance_series) d.push_back(x / norm);
      io::write_svg_plot(r.path("distance.svg"), tr.times, d, "orbit distance", "t", "distance / |Q|");
    }
    print_json(body);
    return kOk;
  }
};

struct ClassifyCmd {
  double omega = 0.1;
  CurveOptions curve;
  bool dynamic = false;
  double eps = 0.01;
  std::optional<double> horizon;

  int run(const Run& r) const {
    Frequency w(omega);
    curve.validate();
    if (horizon && *horizon < 50.0 / omega)
      throw Error(ErrorKind::InvalidArgument, "--horizon must be at least 50/omega");
    if (std::abs(eps) > 0.1 || eps == 0.0)
      throw Error(ErrorKind::PerturbationOutOfRange, "eps must satisfy 0 < |eps| <= 0.1");
    const SolitonCurve c = curve.trace();
    const StabilityVerdict v = classify_stability(w, c);

    io::Metadata meta = r.metadata();
    curve.describe(meta);
    meta.add("omega", io::number(omega));
    json body{{"omega", omega},
              {"classification", to_string(v.classification)},
              {"slope", v.slope},
              {"omega_minus_omega_star", v.omega_vs_star},
              {"omega_star", c.omega_star.value()},
              {"evidence", v.evidence}};
    std::string word = to_string(v.classification);
    if (dynamic) {
      ExperimentConfig cfg;
      cfg.seed = r.seed;
      const ExperimentVerdict e = stability_experiment(w, eps, horizon.value_or(50.0 / omega), cfg, &c);
      json runs = json::array();
      for (const auto& k : e.runs)
        runs.push_back({{"kind", to_string(k.kind)},
                        {"growth", k.growth},
                        {"exit_time", k.exit_time},
                        {"blew_up", k.blew_up}});
      body["dynamic"] = {{"classification", to_string(e.classification)},
                         {"agrees_with_curve", e.agrees_with_curve.value_or(false)},
                         {"numerical_caveat", e.numerical_caveat},
                         {"runs", runs},
                         {"evidence", e.evidence}};
    }
    io::write_json(r.path("classification.json"), meta, body);
    std::cout << word << "\n";
    if (dynamic) std::cout << "dynamic: " << body["dynamic"]["classification"].get<std::string>() << "\n";
    return kOk;
  }
};

struct NormalizedCmd {
  double mass = 0.0;
  CurveOptions curve;

  int run(const Run& r) const {
    if (!(mass > 0)) throw Error(ErrorKind::InvalidArgument, "--mass must be positive");
    curve.validate();
    const SolitonCurve c = curve.trace();
    const auto sols = normalized_solutions(mass, c);

    io::Metadata meta = r.metadata();
    curve.describe(meta);
    meta.add("mass", io::number(mass));
    json list = json::array();
    io::CsvWriter csv(r.path("normalized.csv"), meta, {"omega", "mass"});
    for (Frequency w : sols) {
      const double mw = evaluate(solve_ground_state(w).field).mass;
      list.push_back({{"omega", w.value()}, {"mass", mw}});
      csv.row(std::vector<double>{w.value(), mw});
    }
    csv.close();
    io::write_json(r.path("normalized.json"), meta, {{"mass", mass}, {"m0", c.m0}, {"solutions", list}});
    std::cout << sols.size() << " solution(s)\n";
    for (Frequency w : sols) std::cout << io::number(w.value()) << "\n";
    return kOk;
  }
};

json value_json(const VariationalValue& v) {
  if (std::holds_alternative<Unbounded>(v)) return "unbounded";
  return std::get<double>(v);
}

struct VariationalCmd {
  double mass = 0.0;
  CurveOptions curve;
  bool gradient_flow = false;

  int run(const Run& r) const {
    if (!(mass > 0)) throw Error(ErrorKind::InvalidArgument, "--mass must be positive");
    curve.validate();
    const SolitonCurve c = curve.trace();
    const VariationalResult v = variational_values(mass, c);

    io::Metadata meta = r.metadata();
    curve.describe(meta);
    meta.add("mass", io::number(mass));
    json cands = json::array();
    for (const auto& k : v.candidates)
      cands.push_back({{"branch", k.branch == Branch::Q ? "Q" : "R"}, {"omega", k.omega.value()}, {"energy", k.energy}});
    json body{{"mass", mass},
              {"rho", c.rho},
              {"d_m", value_json(v.d_m)},
              {"d_m_i", value_json(v.d_m_i)},
              {"degenerate_minimum", v.degenerate_minimum},
              {"candidates", cands}};
    if (gradient_flow) {
      const GradientFlowResult g = gradient_flow_oracle(mass);
      body["gradient_flow"] = {
          {"energy", g.energy}, {"mass", g.mass}, {"multiplier", g.multiplier}, {"steps", g.steps}};
    }
    io::write_json(r.path("variational.json"), meta, body);
    print_json(body);
    return kOk;
  }
};

struct ConstantsCmd {
  CurveOptions curve;

  int run(const Run& r) const {
    curve.validate();
    const SolitonCurve c = curve.trace();
    const double rho_from_d0 = 64.0 / 9.0 * c.d0 * c.d0;
    const double floor = 4.0 / (3.0 * std::sqrt(3.0)) * c.rho;

    io::Metadata meta = r.metadata();
    curve.describe(meta);
    json body = io::summary_json(c);
    json checks{{"rho_vs_d0_relative", std::abs(c.rho / rho_from_d0 - 1.0)},
                {"m0_lower_bound", floor},
                {"m0_upper_bound", c.rho},
                {"energy_over_kinetic_at_zero", c.energy_at_zero / c.kinetic_at_zero}};
    json file = body;
    file["checks"] = checks;
    io::write_json(r.path("constants.json"), meta, file);
    print_json(body);

    if (std::abs(c.rho / rho_from_d0 - 1.0) > 1e-3) throw CheckFailed("rho differs from (64/9) d0^2");
    if (!(floor <= c.m0 && c.m0 <= c.rho)) throw CheckFailed("m0 lies outside [(4/(3 sqrt 3)) rho, rho]");
    return kOk;
  }
};

// ---------------------------------------------------------------- config

// Flat key=value lines, '#' comments. Keys are long option names without
// the dashes. Values from the file are inserted only for options absent
// from the command line.
std::vector<std::string> merge_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) file = args[i].substr(9);
  }
  if (file.empty()) return args;
  std::ifstream in(file);
  if (!in) throw CLI::FileError::Missing(file);

  auto given = [&](const std::string& key) {
    for (const auto& a : args)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ConversionError(fmt::format("{}:{}: expected key=value", file, lineno));
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "config" || given(key)) continue;
    if (value == "true") {
      extra.push_back("--" + key);
    } else if (value != "false") {
      extra.push_back("--" + key + "=" + value);
    }
  }
  // Options belong to the subcommand, so they go after it.
  std::size_t at = 1;
  while (at < args.size() && args[at].rfind("-", 0) == 0) ++at;
  args.insert(args.begin() + std::min(at + 1, args.size()), extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the 3D cubic-quintic NLS: curve, spectrum, dynamics"};
  app.set_version_flag("--version", io::version());
  app.require_subcommand(1);

  GroundStateCmd gs;
  CurveCmd curve;
  CriticalCmd critical;
  SpectrumCmd spectrum;
  EvolveCmd evolve_cmd;
  ClassifyCmd classify;
  NormalizedCmd normalized;
  VariationalCmd variational;
  ConstantsCmd constants;
  std::map<std::string, Run> runs;
  std::map<std::string, std::function<int(const Run&)>> actions;

  auto add = [&](const std::string& name, const std::string& help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, runs[name]);
    actions[name] = [&cmd](const Run& r) { return cmd.run(r); };
    return sub;
  };

  auto* s = add("ground-state", "solve for Q_omega; writes profile.csv and report.json", gs);
  s->add_option("--omega", gs.omega, "frequency in (0, 3/16)")->capture_default_str();
  s->add_option("--grid-h", gs.grid_h, "grid spacing")->capture_default_str();

  s = add("curve", "trace the mass curve; writes curve.csv and summary.json", curve);
  curve.curve.attach(s);

  s = add("critical", "locate omega* and m0", critical);
  critical.curve.attach(s);
  s->add_option("--bracket-lo", critical.bracket_lo, "seed bracket, lower end");
  s->add_option("--bracket-hi", critical.bracket_hi, "seed bracket, upper end");
  s->add_option("--tolerance", critical.tolerance, "golden-section width")->capture_default_str();

  s = add("spectrum", "lowest radial eigenvalues of L+ and L-", spectrum);
  s->add_option("--omega", spectrum.omega, "frequency in (0, 3/16)")->capture_default_str();
  s->add_option("--grid-h", spectrum.grid_h, "grid spacing")->capture_default_str();
  s->add_option("--modes", spectrum.modes, "eigenpairs per operator")->capture_default_str();

  s = add("evolve", "time-evolve a (perturbed) soliton", evolve_cmd);
  s->add_option("--omega", evolve_cmd.omega, "frequency in (0, 3/16)")->capture_default_str();
  s->add_option("--eps", evolve_cmd.eps, "perturbation size, |eps| <= 0.1")->capture_default_str();
  s->add_option("--kind", evolve_cmd.kind, "amplitude | mass-preserving | random")->capture_default_str();
  s->add_option("--grid-h", evolve_cmd.grid_h, "grid spacing")->capture_default_str();
  s->add_option("--radius-factor", evolve_cmd.radius_factor, "domain size over the ground-state radius")
      ->capture_default_str();
  s->add_option("--dt", evolve_cmd.dt, "time step")->capture_default_str();
  s->add_option("--time", evolve_cmd.time, "final time")->capture_default_str();
  s->add_option("--record-every", evolve_cmd.record_every, "steps between records")->capture_default_str();
  s->add_flag("--no-absorb", evolve_cmd.no_absorb, "disable the absorbing layer");

  s = add("classify", "slope criterion at omega, optionally a dynamic experiment", classify);
  s->add_option("--omega", classify.omega, "frequency in (0, 3/16)")->capture_default_str();
  classify.curve.attach(s);
  s->add_flag("--dynamic", classify.dynamic, "also run the perturbation experiment");
  s->add_option("--eps", classify.eps, "perturbation size for --dynamic")->capture_default_str();
  s->add_option("--horizon", classify.horizon, "experiment horizon, default 50/omega");

  s = add("normalized", "frequencies with M(Q_omega) = mass", normalized);
  s->add_option("--mass", normalized.mass, "prescribed mass")->required();
  normalized.curve.attach(s);

  s = add("variational", "d_m and d_m^I at a prescribed mass", variational);
  s->add_option("--mass", variational.mass, "prescribed mass")->required();
  variational.curve.attach(s);
  s->add_flag("--gradient-flow", variational.gradient_flow, "also run the gradient-flow oracle");

  s = add("constants", "d0, rho, m0, omega*, omega_{E=0} with inline checks", constants);
  constants.curve.attach(s);

  try {
    std::vector<std::string> args = merge_config(argc, argv);
    std::vector<char*> ptrs;
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const Run& run = runs.at(name);
  if (run.threads > 0) omp_set_num_threads(run.threads);
  try {
    fs::create_directories(run.out);
    return actions.at(name)(run);
  } catch (const Error& e) {
    std::cerr << "cqnls " << name << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const CheckFailed& e) {
    std::cerr << "cqnls " << name << ": check failed: " << e.what() << "\n";
    return kConvergence;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "cqnls " << name << ": " << e.what() << "\n";
    return kDomain;
  }
}
