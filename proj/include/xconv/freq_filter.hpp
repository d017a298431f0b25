#pragma once

#include <algorithm>
#include <optional>
#include <xconv/polar.hpp>

namespace xconv {

/// A 2D filter decomposed into steering components.
///
/// rotation2: F(r,theta) = sum_k f_k(r) e^{i k theta}; component columns hold
/// the radial profiles f_k on n_radii linear samples.
///
/// scale2: F(r,theta) = sum_k f_k(theta) e^{i k w (log r - log r_min)} with
/// w = 2*pi / log(r_max/r_min); component columns hold the angular profiles
/// f_k on n_angles samples.
///
/// Retained frequencies are k in [-K/2, K/2].  At the Nyquist frequency
/// (|k| = n/2) the analysis coefficient is split evenly between +k and -k so
/// that full-band synthesis reproduces the samples exactly.
template <class Real>
struct FreqFilter2 {
  XformKind group = XformKind::rotation2;
  int K = 0;             // band limit as passed to the decomposition
  std::vector<int> ks;   // retained frequencies, ascending
  CGrid<Real> comps;     // (n_radii, |ks|) for rotation2; (n_angles, |ks|) for scale2
  int n_radii = 0;
  int n_angles = 0;
  Real r_max = 0;        // support radius: components are zero beyond it
  Real r_min = 0;        // scale2 only
  Real r_domain = 0;     // scale2: upper end of the log-radial basis domain

  int n_components() const { return static_cast<int>(ks.size()); }

  int index_of(int k) const {
    for (int i = 0; i < n_components(); ++i)
      if (ks[i] == k) return i;
    throw std::invalid_argument("frequency not retained");
  }

  /// Upper end of the log-radial basis domain (defaults to the support).
  Real domain_top() const { return r_domain > 0 ? r_domain : r_max; }

  Real log_period() const { return std::log(domain_top() / r_min); }
  Real omega() const { return Real(2) * Real(EIGEN_PI) / log_period(); }
};

using FreqFilter2d = FreqFilter2<double>;

namespace detail {

inline std::vector<int> retained_ks(int K, int n_periodic) {
  const int kh = K / 2;
  if (kh > n_periodic / 2)
    throw std::invalid_argument("band limit too large for sampling rate");
  std::vector<int> ks;
  for (int k = -kh; k <= kh; ++k) ks.push_back(k);
  return ks;
}

}  // namespace detail

template <class Real>
FreqFilter2<Real> decompose_rotation2(const Field2<Real>& filter, Real cx, Real cy,
                                      int K, int n_radii, int n_angles, Real r_max) {
  PolarGrid<Real> p = resample_polar(filter, cx, cy, n_radii, n_angles, r_max);
  FreqFilter2<Real> f;
  f.group = XformKind::rotation2;
  f.K = K;
  f.ks = detail::retained_ks(K, n_angles);
  f.n_radii = n_radii;
  f.n_angles = n_angles;
  f.r_max = r_max;
  f.comps.resize(n_radii, f.n_components());
  const Real two_pi = Real(2) * Real(EIGEN_PI);
  for (int ci = 0; ci < f.n_components(); ++ci) {
    const int k = f.ks[ci];
    const Real half = (2 * std::abs(k) == n_angles) ? Real(0.5) : Real(1);
    for (int j = 0; j < n_radii; ++j) {
      Cx<Real> acc(0);
      for (int m = 0; m < n_angles; ++m) {
        const Real ph = -two_pi * k * m / n_angles;
        acc += p.values(j, m) * Cx<Real>(std::cos(ph), std::sin(ph));
      }
      f.comps(j, ci) = acc * half / Real(n_angles);
    }
  }
  return f;
}

template <class Real>
FreqFilter2<Real> decompose_scale2(const Field2<Real>& filter, Real cx, Real cy,
                                   int K, int n_radii, int n_angles, Real r_min,
                                   Real r_max, Real r_domain = 0) {
  if (!(r_min > Real(0)))
    throw std::invalid_argument("r_min must be > 0 (log-polar excludes the origin)");
  if (r_domain != Real(0) && r_domain < r_max)
    throw std::invalid_argument("basis domain must reach the support radius");
  // sampling the basis domain past the support leaves zeros between the
  // filter content and the log-period boundary, so downscaling does not wrap
  // the large inner values into the outer support
  const Real D = r_domain > 0 ? r_domain : r_max;
  PolarGrid<Real> p = resample_polar_log(filter, cx, cy, n_radii, n_angles, r_min, D);
  FreqFilter2<Real> f;
  f.group = XformKind::scale2;
  f.K = K;
  f.ks = detail::retained_ks(K, n_radii);
  f.n_radii = n_radii;
  f.n_angles = n_angles;
  f.r_max = r_max;
  f.r_min = r_min;
  f.r_domain = D;
  f.comps.resize(n_angles, f.n_components());
  const Real two_pi = Real(2) * Real(EIGEN_PI);
  for (int ci = 0; ci < f.n_components(); ++ci) {
    const int k = f.ks[ci];
    const Real half = (2 * std::abs(k) == n_radii) ? Real(0.5) : Real(1);
    for (int m = 0; m < n_angles; ++m) {
      Cx<Real> acc(0);
      for (int j = 0; j < n_radii; ++j) {
        // basis phase at r_j: k*w*(log r_j - log r_min) = 2*pi*k*(j+0.5)/n_radii
        const Real ph = -two_pi * k * (j + Real(0.5)) / n_radii;
        acc += p.values(j, m) * Cx<Real>(std::cos(ph), std::sin(ph));
      }
      f.comps(m, ci) = acc * half / Real(n_radii);
    }
  }
  return f;
}

/// Value of component ci at polar position (r, theta), r already <= r_max.
template <class Real>
Cx<Real> component_value(const FreqFilter2<Real>& f, int ci, Real r, Real theta) {
  const int k = f.ks[ci];
  if (f.group == XformKind::rotation2) {
    // the angle is undefined at the origin, so only the angular mean (k = 0)
    // contributes there; rotations fix the origin, matching this convention
    if (r <= Real(1e-9) && k != 0) return Cx<Real>(0);
    // linear interpolation of the radial profile at half-integer samples
    Real u = r / f.r_max * f.n_radii - Real(0.5);
    if (u < 0) u = 0;
    if (u > f.n_radii - 1) u = Real(f.n_radii - 1);
    const int j0 = static_cast<int>(u);
    const int j1 = std::min(j0 + 1, f.n_radii - 1);
    const Real t = u - j0;
    const Cx<Real> prof = (1 - t) * f.comps(j0, ci) + t * f.comps(j1, ci);
    return prof * std::polar(Real(1), k * theta);
  }
  // scale2: angular profile interpolated with wrap, log-radial phase
  const int na = f.n_angles;
  Real v = theta / (Real(2) * Real(EIGEN_PI)) * na;
  v = v - std::floor(v / na) * na;
  const int m0 = static_cast<int>(v) % na;
  const int m1 = (m0 + 1) % na;
  const Real t = v - std::floor(v);
  if (r < f.r_min) return Cx<Real>(0);  // the inner disk is carried separately
  const Cx<Real> prof = (1 - t) * f.comps(m0, ci) + t * f.comps(m1, ci);
  return prof * std::polar(Real(1), f.ks[ci] * f.omega() * std::log(r / f.r_min));
}

/// Value carried by the disk r < r_min of a scale-group filter: the
/// angular mean of the synthesis at the inner boundary.  The log-radial basis
/// excludes the origin, and a scaling fixes it, so this disk contributes an
/// unsteered pointwise term instead of entering the component convolutions.
template <class Real>
Cx<Real> inner_dc_value(const FreqFilter2<Real>& f) {
  if (f.group != XformKind::scale2) return Cx<Real>(0);
  return f.comps.colwise().mean().sum();
}

/// Render one component on the Cartesian grid (zero beyond r_max).
template <class Real>
Field2<Real> render_component(const FreqFilter2<Real>& f, int ci, int width,
                              int height, Real cx, Real cy) {
  Field2<Real> out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const Real dx = Real(x) - cx, dy = Real(y) - cy;
      const Real r = std::sqrt(dx * dx + dy * dy);
      if (r > f.r_max) continue;
      out.at(x, y) = component_value(f, ci, r, std::atan2(dy, dx));
    }
  return out;
}

/// Synthesis on the filter's own polar sample grid.
template <class Real>
PolarGrid<Real> synthesize_polar(const FreqFilter2<Real>& f,
                                 const std::optional<std::vector<int>>& subset = {}) {
  PolarGrid<Real> g;
  g.r_max = f.group == XformKind::scale2 ? f.domain_top() : f.r_max;
  if (f.group == XformKind::scale2) {
    g.log_radial = true;
    g.r_min = f.r_min;
  }
  g.values = CGrid<Real>::Zero(f.n_radii, f.n_angles);
  const Real two_pi = Real(2) * Real(EIGEN_PI);
  for (int ci = 0; ci < f.n_components(); ++ci) {
    const int k = f.ks[ci];
    if (subset && std::find(subset->begin(), subset->end(), k) == subset->end())
      continue;
    for (int j = 0; j < f.n_radii; ++j)
      for (int m = 0; m < f.n_angles; ++m) {
        const Real ph = f.group == XformKind::rotation2
                            ? two_pi * k * m / f.n_angles
                            : two_pi * k * (j + Real(0.5)) / f.n_radii;
        const Cx<Real>& prof = f.group == XformKind::rotation2 ? f.comps(j, ci)
                                                               : f.comps(m, ci);
        g.values(j, m) += prof * Cx<Real>(std::cos(ph), std::sin(ph));
      }
  }
  return g;
}

/// Synthesize the (optionally truncated) filter on a Cartesian grid.
template <class Real>
Field2<Real> reconstruct(const FreqFilter2<Real>& f, int width, int height,
                         Real cx, Real cy,
                         const std::optional<std::vector<int>>& subset = {}) {
  Field2<Real> out(width, height);
  for (int ci = 0; ci < f.n_components(); ++ci) {
    if (subset && std::find(subset->begin(), subset->end(), f.ks[ci]) == subset->end())
      continue;
    out.values += render_component(f, ci, width, height, cx, cy).values;
  }
  if (f.group == XformKind::scale2) {
    const Cx<Real> dc = inner_dc_value(f);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const Real dx = Real(x) - cx, dy = Real(y) - cy;
        if (dx * dx + dy * dy < f.r_min * f.r_min) out.at(x, y) = dc;
      }
  }
  return out;
}

}  // namespace xconv
