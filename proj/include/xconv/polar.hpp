#pragma once

#include <xconv/field.hpp>

namespace xconv {

/// Filter samples on a polar (or log-polar) grid.  Rows index radius,
/// columns index angle theta_m = 2*pi*m/n_angles.  Linear radii sit at
/// r_j = (j+0.5)*r_max/n_radii; log radii at
/// r_j = r_min*(r_max/r_min)^((j+0.5)/n_radii).
template <class Real>
struct PolarGrid {
  CGrid<Real> values;  // (n_radii, n_angles)
  Real r_max = 0;
  Real r_min = 0;  // used when log_radial
  bool log_radial = false;
  Cx<Real> inner_dc{0};  // value of the disk r < r_min (log_radial only)

  int n_radii() const { return static_cast<int>(values.rows()); }
  int n_angles() const { return static_cast<int>(values.cols()); }

  Real radius(int j) const {
    if (log_radial)
      return r_min * std::pow(r_max / r_min, (Real(j) + Real(0.5)) / n_radii());
    return (Real(j) + Real(0.5)) * r_max / n_radii();
  }

  /// Fractional radial index of a radius (inverse of radius()).
  Real radial_index(Real r) const {
    if (log_radial)
      return std::log(r / r_min) / std::log(r_max / r_min) * n_radii() - Real(0.5);
    return r / r_max * n_radii() - Real(0.5);
  }
};

namespace detail {
template <class Real>
void check_polar_params(int n_radii, int n_angles, Real r_max) {
  if (n_radii < 1) throw std::invalid_argument("n_radii must be >= 1");
  if (n_angles < 4 || n_angles % 2 != 0)
    throw std::invalid_argument("n_angles must be >= 4 and even");
  if (!(r_max > Real(0))) throw std::invalid_argument("r_max must be > 0");
}
}  // namespace detail

template <class Real>
PolarGrid<Real> resample_polar(const Field2<Real>& f, Real cx, Real cy,
                               int n_radii, int n_angles, Real r_max) {
  detail::check_polar_params(n_radii, n_angles, r_max);
  PolarGrid<Real> g;
  g.r_max = r_max;
  g.values.resize(n_radii, n_angles);
  for (int j = 0; j < n_radii; ++j) {
    const Real r = g.radius(j);
    for (int m = 0; m < n_angles; ++m) {
      const Real th = Real(2) * Real(EIGEN_PI) * m / n_angles;
      g.values(j, m) = f.sample(cx + r * std::cos(th), cy + r * std::sin(th));
    }
  }
  return g;
}

template <class Real>
PolarGrid<Real> resample_polar_log(const Field2<Real>& f, Real cx, Real cy,
                                   int n_radii, int n_angles, Real r_min,
                                   Real r_max) {
  detail::check_polar_params(n_radii, n_angles, r_max);
  if (!(r_min > Real(0)) || !(r_min < r_max))
    throw std::invalid_argument("log-polar sampling needs 0 < r_min < r_max");
  PolarGrid<Real> g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.log_radial = true;
  g.values.resize(n_radii, n_angles);
  for (int j = 0; j < n_radii; ++j) {
    const Real r = g.radius(j);
    for (int m = 0; m < n_angles; ++m) {
      const Real th = Real(2) * Real(EIGEN_PI) * m / n_angles;
      g.values(j, m) = f.sample(cx + r * std::cos(th), cy + r * std::sin(th));
    }
  }
  return g;
}

/// Bilinear lookup in (radius, angle); the angular coordinate wraps and the
/// radial index is clamped at the inner ring.  Returns 0 beyond r_max; at the
/// origin the angle is undefined, so the inner-ring angular mean is returned.
template <class Real>
Cx<Real> polar_sample(const PolarGrid<Real>& g, Real r, Real theta) {
  if (r > g.r_max) return Cx<Real>(0);
  if (r <= Real(1e-9)) return g.values.row(0).mean();
  const int nr = g.n_radii(), na = g.n_angles();
  Real u = g.radial_index(r);
  if (u < 0) u = 0;
  if (u > nr - 1) u = Real(nr - 1);
  const int j0 = std::min(static_cast<int>(u), nr - 1);
  const int j1 = std::min(j0 + 1, nr - 1);
  const Real tu = u - j0;
  Real v = theta / (Real(2) * Real(EIGEN_PI)) * na;
  v = v - std::floor(v / na) * na;
  int m0 = static_cast<int>(v) % na;
  const int m1 = (m0 + 1) % na;
  const Real tv = v - std::floor(v);
  return (1 - tu) * ((1 - tv) * g.values(j0, m0) + tv * g.values(j0, m1)) +
         tu * ((1 - tv) * g.values(j1, m0) + tv * g.values(j1, m1));
}

template <class Real>
Field2<Real> resample_cartesian(const PolarGrid<Real>& g, int width, int height,
                                Real cx, Real cy) {
  if (g.values.size() == 0) throw std::invalid_argument("empty polar grid");
  Field2<Real> out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Real dx = Real(x) - cx, dy = Real(y) - cy;
      const Real r = std::sqrt(dx * dx + dy * dy);
      if (r > g.r_max) continue;
      out.at(x, y) = polar_sample(g, r, std::atan2(dy, dx));
    }
  }
  return out;
}

}  // namespace xconv
