#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cqnls/dynamics.hpp"
#include "cqnls/functionals.hpp"
#include "cqnls/soliton_curve.hpp"
#include "cqnls/spectral.hpp"

namespace cqnls::io {

inline constexpr int kSchemaVersion = 1;

std::string version();

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Provenance written as '#'-prefixed lines at the top of every CSV and as a
/// "metadata" object in every JSON file.
struct Metadata {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;  ///< grid parameters and the like

  void add(std::string key, std::string value) { extra.emplace_back(std::move(key), std::move(value)); }
  void add_grid(const RadialGrid& g);
};

/// Shortest round-trip decimal form.
std::string number(double x);

/// Buffers rows and writes the file in close() or the destructor.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const Metadata& meta, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::string buffer_;
  bool closed_ = false;
};

/// Adds schema_version and metadata, then writes with two-space indentation.
void write_json(const std::filesystem::path& path, const Metadata& meta, nlohmann::json body);

nlohmann::json to_json(const FunctionalReport& r);
nlohmann::json to_json(const CurvePoint& p);
nlohmann::json summary_json(const SolitonCurve& c);

void write_profile_csv(const std::filesystem::path& path, const Metadata& meta, const RadialProfile& q);
void write_curve_csv(const std::filesystem::path& path, const Metadata& meta, const std::vector<CurvePoint>& pts);
void write_spectrum_csv(const std::filesystem::path& path, const Metadata& meta, double omega,
                        const std::vector<std::pair<OperatorKind, std::vector<EigenPair>>>& spectra);
void write_mode_csv(const std::filesystem::path& path, const Metadata& meta, const RadialGrid& g,
                    const EigenPair& mode);
void write_trajectory_csv(const std::filesystem::path& path, const Metadata& meta, const TrajectoryRecord& tr);
void write_snapshot_csv(const std::filesystem::path& path, const Metadata& meta, const ComplexRadialField& f);

/// Minimal SVG polyline plot of y against x.
void write_svg_plot(const std::filesystem::path& path, const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& title, const std::string& x_label, const std::string& y_label);

}  // namespace cqnls::io
