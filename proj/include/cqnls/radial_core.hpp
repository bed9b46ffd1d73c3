#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cqnls {

/// Default node spacing. A power of two so that grids built for different
/// frequencies share their nodes exactly.
inline constexpr double kDefaultSpacing = 1.0 / 64.0;

/// Uniform radial grid storing interior nodes r_i = (i + 1) h, i = 0..n-1,
/// with r_{n-1} = r_max. The origin is reconstructed by even extension and
/// the point r_max + h is the Dirichlet wall for the v = r u transform.
class RadialGrid {
 public:
  RadialGrid(double r_max, std::size_t n);

  /// Smallest grid with spacing exactly h whose r_max is at least min_radius.
  static RadialGrid with_spacing(double h, double min_radius);

  /// r_max >= max(40 / sqrt(omega), 60) at spacing h.
  static RadialGrid for_frequency(double omega, double h = kDefaultSpacing);

  double r_max() const { return data_->r_max; }
  double spacing() const { return data_->h; }
  std::size_t size() const { return data_->nodes.size(); }
  double node(std::size_t i) const { return data_->nodes[i]; }
  std::span<const double> nodes() const { return data_->nodes; }

  /// 4 pi w_i r_i^2 with w_i composite Simpson weights on [0, r_max]
  /// (3/8 rule on the last three panels when the panel count is odd).
  std::span<const double> volume_weights() const { return data_->volume_weights; }

  friend bool operator==(const RadialGrid& a, const RadialGrid& b) {
    return a.size() == b.size() && a.spacing() == b.spacing();
  }

 private:
  struct Data {
    double r_max;
    double h;
    std::vector<double> nodes;
    std::vector<double> volume_weights;
  };
  std::shared_ptr<const Data> data_;
};

struct RealRadialFunction {
  RealRadialFunction(RadialGrid g, std::vector<double> v);

  RadialGrid grid;
  std::vector<double> values;
};

struct ComplexRadialFunction {
  ComplexRadialFunction(RadialGrid g, std::vector<std::complex<double>> v);
  explicit ComplexRadialFunction(const RealRadialFunction& f);

  RadialGrid grid;
  std::vector<std::complex<double>> values;
};

/// 4 pi int g(r) r^2 dr for samples g on the grid nodes.
double integrate_density(const RadialGrid& grid, std::span<const double> g);

/// int |f|^p dx over R^3 for the radial function f. No tail correction.
double integrate_radial(const RealRadialFunction& f, int power);

/// Value at r = 0 of an even function from its first three samples.
double value_at_origin(std::span<const double> values);

/// f'(r_i) by centered fourth-order differences, even extension at the
/// origin and one-sided stencils at the outer end.
std::vector<double> radial_derivative(const RadialGrid& grid, std::span<const double> values);

/// f''(r_i), same stencil family as radial_derivative.
std::vector<double> radial_second_derivative(const RadialGrid& grid,
                                             std::span<const double> values);

/// int |grad f|^2 dx.
double gradient_norm_sq(const RealRadialFunction& f);
double gradient_norm_sq(const ComplexRadialFunction& f);

double h1_norm(const RealRadialFunction& f);
double h1_norm(const ComplexRadialFunction& f);

/// Sixth-order Lagrange interpolation on the uniform grid, even extension
/// through the origin. Requires 0 <= r <= r_max.
double interpolate(const RadialGrid& grid, std::span<const double> values, double r);

struct OrbitDistance {
  double distance;
  double phase;  ///< minimizing theta in [0, 2 pi)
};

/// min over theta of ||u - e^{i theta} Q||_{H^1}. The minimizer is the
/// argument of the H^1 inner product <u, Q>. Translations are not searched.
OrbitDistance orbit_distance_with_phase(const ComplexRadialFunction& u,
                                        const RealRadialFunction& q);
double orbit_distance(const ComplexRadialFunction& u, const RealRadialFunction& q);

}  // namespace cqnls
