#include "cqnls/io.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cqnls/error.hpp"

#ifndef CQNLS_VERSION
#define CQNLS_VERSION "0.0.0"
#endif

namespace cqnls::io {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write to " + path.string() + " failed");
}

}  // namespace

std::string version() { return CQNLS_VERSION; }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

void Metadata::add_grid(const RadialGrid& g) {
  add("grid_n", std::to_string(g.size()));
  add("grid_h", number(g.spacing()));
  add("grid_r_max", number(g.r_max()));
}

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

CsvWriter::CsvWriter(std::filesystem::path path, const Metadata& meta, const std::vector<std::string>& columns)
    : path_(std::move(path)), columns_(columns.size()) {
  buffer_ += fmt::format("# command: {}\n# version: {}\n# config_hash: {}\n# seed: {}\n", meta.command, version(),
                         meta.config_hash, meta.seed);
  for (const auto& [k, v] : meta.extra) buffer_ += fmt::format("# {}: {}\n", k, v);
  for (std::size_t i = 0; i < columns.size(); ++i) buffer_ += (i ? "," : "") + columns[i];
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double x : values) cells.push_back(number(x));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error(ErrorKind::InvalidArgument, "row width differs from the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += cells[i];
  }
  buffer_ += '\n';
}

void CsvWriter::close() {
  closed_ = true;
  write_file(path_, buffer_);
}

void write_json(const std::filesystem::path& path, const Metadata& meta, nlohmann::json body) {
  nlohmann::json m;
  m["command"] = meta.command;
  m["version"] = version();
  m["config_hash"] = meta.config_hash;
  m["seed"] = meta.seed;
  for (const auto& [k, v] : meta.extra) m[k] = v;
  body["schema_version"] = kSchemaVersion;
  body["metadata"] = m;
  write_file(path, body.dump(2) + "\n");
}

nlohmann::json to_json(const FunctionalReport& r) {
  nlohmann::json j;
  j["mass"] = r.mass;
  j["energy"] = r.energy;
  j["pohozaev"] = r.pohozaev;
  j["kinetic"] = r.kinetic;
  j["p4"] = r.p4;
  j["p6"] = r.p6;
  j["weinstein"] = r.weinstein ? nlohmann::json(*r.weinstein) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const CurvePoint& p) {
  return {{"omega", p.omega.value()}, {"mass", p.mass},   {"energy", p.energy},
          {"kinetic", p.kinetic},     {"p4", p.p4},       {"p6", p.p6},
          {"beta", p.beta},           {"lambda_star", p.lambda_star}, {"weinstein", p.weinstein}};
}

nlohmann::json summary_json(const SolitonCurve& c) {
  return {{"omega_star", c.omega_star.value()},
          {"m0", c.m0},
          {"omega_zero_energy", c.omega_zero_energy.value()},
          {"d0", c.d0},
          {"rho", c.rho}};
}

void write_profile_csv(const std::filesystem::path& path, const Metadata& meta, const RadialProfile& q) {
  CsvWriter w(path, meta, {"r", "Q"});
  const auto& g = q.grid();
  for (std::size_t i = 0; i < g.size(); ++i) w.row(std::vector<double>{g.node(i), q.values()[i]});
  w.close();
}

void write_curve_csv(const std::filesystem::path& path, const Metadata& meta, const std::vector<CurvePoint>& pts) {
  CsvWriter w(path, meta, {"omega", "mass", "energy", "kinetic", "p4", "p6", "beta", "lambda_star", "weinstein"});
  for (const auto& p : pts)
    w.row(std::vector<double>{p.omega.value(), p.mass, p.energy, p.kinetic, p.p4, p.p6, p.beta, p.lambda_star,
                              p.weinstein});
  w.close();
}

void write_spectrum_csv(const std::filesystem::path& path, const Metadata& meta, double omega,
                        const std::vector<std::pair<OperatorKind, std::vector<EigenPair>>>& spectra) {
  CsvWriter w(path, meta, {"omega", "kind", "index", "eigenvalue"});
  for (const auto& [kind, pairs] : spectra)
    for (std::size_t i = 0; i < pairs.size(); ++i)
      w.row(std::vector<std::string>{number(omega), to_string(kind), std::to_string(i), number(pairs[i].value)});
  w.close();
}

void write_mode_csv(const std::filesystem::path& path, const Metadata& meta, const RadialGrid& g,
                    const EigenPair& mode) {
  CsvWriter w(path, meta, {"r", "v"});
  for (std::size_t i = 0; i < g.size(); ++i) w.row(std::vector<double>{g.node(i), mode.vector[i]});
  w.close();
}

void write_trajectory_csv(const std::filesystem::path& path, const Metadata& meta, const TrajectoryRecord& tr) {
  CsvWriter w(path, meta, {"t", "mass", "energy", "orbit_distance"});
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double d = tr.orbit_distance_series.empty() ? std::nan("") : tr.orbit_distance_series[i];
    w.row(std::vector<double>{tr.times[i], tr.mass_series[i], tr.energy_series[i], d});
  }
  w.close();
}

void write_snapshot_csv(const std::filesystem::path& path, const Metadata& meta, const ComplexRadialField& f) {
  CsvWriter w(path, meta, {"r", "re_u", "im_u"});
  const auto u = f.u();
  for (std::size_t i = 0; i < u.values.size(); ++i)
    w.row(std::vector<double>{f.grid.node(i), u.values[i].real(), u.values[i].imag()});
  w.close();
}

void write_svg_plot(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& title, const std::string& x_label, const std::string& y_label) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InvalidArgument, "plot needs matching series");
  const double width = 640, height = 400, margin = 60;
  const auto [x_lo, x_hi] = std::minmax_element(x.begin(), x.end());
  const auto [y_lo, y_hi] = std::minmax_element(y.begin(), y.end());
  const double sx = (width - 2 * margin) / std::max(*x_hi - *x_lo, 1e-300);
  const double sy = (height - 2 * margin) / std::max(*y_hi - *y_lo, 1e-300);
  std::string pts;
  for (std::size_t i = 0; i < x.size(); ++i)
    pts += fmt::format("{:.2f},{:.2f} ", margin + (x[i] - *x_lo) * sx, height - margin - (y[i] - *y_lo) * sy);
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n"
      "<rect x=\"{2}\" y=\"{2}\" width=\"{3}\" height=\"{4}\" fill=\"none\" stroke=\"#888\"/>\n"
      "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"{5}\"/>\n"
      "<text x=\"{6}\" y=\"24\" text-anchor=\"middle\">{7}</text>\n"
      "<text x=\"{6}\" y=\"{8}\" text-anchor=\"middle\">{9}</text>\n"
      "<text x=\"16\" y=\"{10}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {10})\">{11}</text>\n"
      "<text x=\"{2}\" y=\"{12}\">{13}</text><text x=\"{14}\" y=\"{12}\" text-anchor=\"end\">{15}</text>\n"
      "<text x=\"{16}\" y=\"{17}\" text-anchor=\"end\">{18}</text><text x=\"{16}\" y=\"{19}\" "
      "text-anchor=\"end\">{20}</text>\n</svg>\n",
      width, height, margin, width - 2 * margin, height - 2 * margin, pts, width / 2, title, height - 16, x_label,
      height / 2, y_label, height - margin + 16, number(*x_lo), width - margin, number(*x_hi), margin - 4,
      height - margin, number(*y_lo), margin + 4, number(*y_hi));
  write_file(path, svg);
}

}  // namespace cqnls::io
