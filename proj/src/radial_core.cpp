#include "cqnls/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cqnls/error.hpp"
#include "cqnls/kernels.hpp"

namespace cqnls {

namespace {

constexpr std::size_t kMinNodes = 64;

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw Error(ErrorKind::InvalidField, std::string(what) + " has non-finite samples");
}

/// Sample at r = k h, k in Z, with f(0) reconstructed and f(-r) = f(r).
class EvenExtension {
 public:
  explicit EvenExtension(std::span<const double> v) : v_(v), origin_(value_at_origin(v)) {}

  double operator()(std::ptrdiff_t k) const {
    if (k < 0) k = -k;
    return k == 0 ? origin_ : v_[static_cast<std::size_t>(k - 1)];
  }

 private:
  std::span<const double> v_;
  double origin_;
};

std::vector<double> split(std::span<const std::complex<double>> z, bool imag) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = imag ? z[i].imag() : z[i].real();
  return out;
}

}  // namespace

RadialGrid::RadialGrid(double r_max, std::size_t n) {
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw Error(ErrorKind::InvalidArgument, "grid radius must be positive");
  if (n < kMinNodes) throw Error(ErrorKind::GridTooCoarse, "grid needs at least 64 nodes");

  Data d;
  d.r_max = r_max;
  d.h = r_max / static_cast<double>(n);
  d.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.nodes[i] = static_cast<double>(i + 1) * d.h;
  d.nodes.back() = r_max;

  // Simpson on the n panels [0, r_max]; the origin carries no weight since r^2 = 0 there.
  std::vector<double> w(n + 1, 0.0);
  const std::size_t simpson_panels = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= simpson_panels; i += 2) {
    w[i] += 1.0 / 3.0;
    w[i + 1] += 4.0 / 3.0;
    w[i + 2] += 1.0 / 3.0;
  }
  if (simpson_panels != n) {
    const std::size_t j = n - 3;
    w[j] += 3.0 / 8.0;
    w[j + 1] += 9.0 / 8.0;
    w[j + 2] += 9.0 / 8.0;
    w[j + 3] += 3.0 / 8.0;
  }
  d.volume_weights.resize(n);
  const double four_pi = 4.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = d.nodes[i];
    d.volume_weights[i] = four_pi * w[i + 1] * d.h * r * r;
  }
  data_ = std::make_shared<const Data>(std::move(d));
}

RadialGrid RadialGrid::with_spacing(double h, double min_radius) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(min_radius / h - 1e-9));
  return RadialGrid(static_cast<double>(n) * h, n);
}

RadialGrid RadialGrid::for_frequency(double omega, double h) {
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "frequency must be positive");
  return with_spacing(h, std::max(40.0 / std::sqrt(omega), 60.0));
}

RealRadialFunction::RealRadialFunction(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  require_finite(values, "radial function");
}

ComplexRadialFunction::ComplexRadialFunction(RadialGrid g, std::vector<std::complex<double>> v)
    : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  for (auto z : values)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::InvalidField, "complex radial function has non-finite samples");
}

ComplexRadialFunction::ComplexRadialFunction(const RealRadialFunction& f)
    : grid(f.grid), values(f.values.begin(), f.values.end()) {}

double integrate_density(const RadialGrid& grid, std::span<const double> g) {
  if (g.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "density size differs from grid size");
  return kernels::parallel::weighted_sum(g, grid.volume_weights());
}

double integrate_radial(const RealRadialFunction& f, int power) {
  if (power < 0) throw Error(ErrorKind::InvalidArgument, "integration power must be non-negative");
  std::vector<double> g(f.values.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = f.values[i];
    double y = 1.0;
    for (int k = 0; k < power; ++k) y *= x;
    g[i] = y;
  }
  require_finite(g, "integrand");
  return integrate_density(f.grid, g);
}

double value_at_origin(std::span<const double> v) {
  // even polynomial c0 + c2 r^2 + c4 r^4 through r = h, 2h, 3h
  return 1.5 * v[0] - 0.6 * v[1] + 0.1 * v[2];
}

std::vector<double> radial_derivative(const RadialGrid& grid, std::span<const double> v) {
  const std::size_t n = grid.size();
  if (v.size() != n) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  if (n < 6) throw Error(ErrorKind::GridTooCoarse, "fourth-order stencil needs six nodes");
  const EvenExtension f(v);
  const double c = 1.0 / (12.0 * grid.spacing());
  std::vector<double> d(n);
  const auto last = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t k = 1; k <= last; ++k) {
    double s;
    if (k + 2 <= last) {
      s = f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2);
    } else if (k + 1 == last) {
      s = 3.0 * f(k + 1) + 10.0 * f(k) - 18.0 * f(k - 1) + 6.0 * f(k - 2) - f(k - 3);
    } else {
      s = 25.0 * f(k) - 48.0 * f(k - 1) + 36.0 * f(k - 2) - 16.0 * f(k - 3) + 3.0 * f(k - 4);
    }
    d[static_cast<std::size_t>(k - 1)] = s * c;
  }
  return d;
}

std::vector<double> radial_second_derivative(const RadialGrid& grid, std::span<const double> v) {
  const std::size_t n = grid.size();
  if (v.size() != n) throw Error(ErrorKind::GridMismatch, "sample count differs from grid size");
  if (n < 6) throw Error(ErrorKind::GridTooCoarse, "fourth-order stencil needs six nodes");
  const EvenExtension f(v);
  const double h = grid.spacing();
  const double c = 1.0 / (12.0 * h * h);
  std::vector<double> d(n);
  const auto last = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t k = 1; k <= last; ++k) {
    double s;
    if (k + 2 <= last) {
      s = -f(k - 2) + 16.0 * f(k - 1) - 30.0 * f(k) + 16.0 * f(k + 1) - f(k + 2);
    } else if (k + 1 == last) {
      s = 10.0 * f(k + 1) - 15.0 * f(k) - 4.0 * f(k - 1) + 14.0 * f(k - 2) - 6.0 * f(k - 3) + f(k - 4);
    } else {
      s = 45.0 * f(k) - 154.0 * f(k - 1) + 214.0 * f(k - 2) - 156.0 * f(k - 3) + 61.0 * f(k - 4) -
          10.0 * f(k - 5);
    }
    d[static_cast<std::size_t>(k - 1)] = s * c;
  }
  return d;
}

double gradient_norm_sq(const RealRadialFunction& f) {
  auto d = radial_derivative(f.grid, f.values);
  for (double& x : d) x *= x;
  return integrate_density(f.grid, d);
}

double gradient_norm_sq(const ComplexRadialFunction& f) {
  auto dr = radial_derivative(f.grid, split(f.values, false));
  const auto di = radial_derivative(f.grid, split(f.values, true));
  for (std::size_t i = 0; i < dr.size(); ++i) dr[i] = dr[i] * dr[i] + di[i] * di[i];
  return integrate_density(f.grid, dr);
}

double h1_norm(const RealRadialFunction& f) {
  return std::sqrt(integrate_radial(f, 2) + gradient_norm_sq(f));
}

double h1_norm(const ComplexRadialFunction& f) {
  std::vector<double> m(f.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::norm(f.values[i]);
  return std::sqrt(integrate_density(f.grid, m) + gradient_norm_sq(f));
}

double interpolate(const RadialGrid& grid, std::span<const double> values, double r) {
  const double h = grid.spacing();
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  if (r < 0.0 || r > grid.r_max() * (1.0 + 1e-14))
    throw Error(ErrorKind::InvalidArgument, "interpolation point outside the grid");
  const EvenExtension f(values);
  const double x = r / h;
  auto k0 = static_cast<std::ptrdiff_t>(std::floor(x)) - 2;
  k0 = std::min(k0, n - 5);
  double sum = 0.0;
  for (std::ptrdiff_t j = 0; j < 6; ++j) {
    double w = 1.0;
    for (std::ptrdiff_t m = 0; m < 6; ++m)
      if (m != j) w *= (x - static_cast<double>(k0 + m)) / static_cast<double>(j - m);
    sum += w * f(k0 + j);
  }
  return sum;
}

OrbitDistance orbit_distance_with_phase(const ComplexRadialFunction& u, const RealRadialFunction& q) {
  if (!(u.grid == q.grid)) throw Error(ErrorKind::GridMismatch, "field and profile live on different grids");
  const auto ur = split(u.values, false);
  const auto ui = split(u.values, true);
  const auto dur = radial_derivative(u.grid, ur);
  const auto dui = radial_derivative(u.grid, ui);
  const auto dq = radial_derivative(q.grid, q.values);

  std::vector<double> re(q.values.size()), im(q.values.size());
  for (std::size_t i = 0; i < re.size(); ++i) {
    re[i] = ur[i] * q.values[i] + dur[i] * dq[i];
    im[i] = ui[i] * q.values[i] + dui[i] * dq[i];
  }
  const double ip_re = integrate_density(u.grid, re);
  const double ip_im = integrate_density(u.grid, im);
  double theta = std::atan2(ip_im, ip_re);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;

  const std::complex<double> rot = std::polar(1.0, theta);
  std::vector<std::complex<double>> w(u.values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u.values[i] - rot * q.values[i];
  return {h1_norm(ComplexRadialFunction(u.grid, std::move(w))), theta};
}

double orbit_distance(const ComplexRadialFunction& u, const RealRadialFunction& q) {
  return orbit_distance_with_phase(u, q).distance;
}

}  // namespace cqnls
