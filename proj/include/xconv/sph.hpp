#pragma once

#include <algorithm>
#include <optional>
#include <xconv/field.hpp>

namespace xconv {

namespace detail {

/// Fully-normalized associated Legendre values P~_l^m(cos theta) for all
/// 0 <= l <= lmax, 0 <= m <= l, including the Condon-Shortley phase, so that
/// Y_l^m = P~_l^m(cos theta) e^{i m phi} is orthonormal on the sphere.
template <class Real>
std::vector<Real> legendre_table(int lmax, Real ct) {
  const Real st = std::sqrt(std::max(Real(0), 1 - ct * ct));
  auto idx = [](int l, int m) { return l * (l + 1) / 2 + m; };
  std::vector<Real> P(static_cast<size_t>(idx(lmax, lmax)) + 1);
  P[idx(0, 0)] = std::sqrt(Real(1) / (4 * Real(EIGEN_PI)));
  for (int m = 1; m <= lmax; ++m)
    P[idx(m, m)] = -std::sqrt(Real(2 * m + 1) / Real(2 * m)) * st * P[idx(m - 1, m - 1)];
  for (int m = 0; m < lmax; ++m)
    P[idx(m + 1, m)] = std::sqrt(Real(2 * m + 3)) * ct * P[idx(m, m)];
  for (int m = 0; m <= lmax; ++m)
    for (int l = m + 2; l <= lmax; ++l) {
      const Real a = std::sqrt(Real(4 * l * l - 1) / Real(l * l - m * m));
      const Real b = std::sqrt(Real((l - 1) * (l - 1) - m * m) /
                               Real(4 * (l - 1) * (l - 1) - 1));
      P[idx(l, m)] = a * (ct * P[idx(l - 1, m)] - b * P[idx(l - 2, m)]);
    }
  return P;
}

}  // namespace detail

/// Orthonormal complex spherical harmonic with Condon-Shortley phase.
/// theta is the polar angle from +z, phi the azimuth.
template <class Real>
Cx<Real> sph_harm(int l, int m, Real theta, Real phi) {
  const int am = std::abs(m);
  if (am > l) throw std::invalid_argument("|m| must be <= l");
  auto P = detail::legendre_table<Real>(l, std::cos(theta));
  const Real p = P[l * (l + 1) / 2 + am];
  Cx<Real> y = p * std::polar(Real(1), am * phi);
  if (m < 0) y = (am % 2 ? Real(-1) : Real(1)) * std::conj(y);
  return y;
}

/// Angular sampling grid for per-shell spherical harmonic analysis:
/// equiangular midpoints in theta with quadrature weights that integrate
/// Legendre polynomials exactly up to degree n_theta-1, uniform in phi.
template <class Real>
struct SphereGrid {
  int n_theta = 0, n_phi = 0;
  std::vector<Real> theta, weight;  // weight includes sin-theta measure

  explicit SphereGrid(int n_theta_, int n_phi_)
      : n_theta(n_theta_), n_phi(n_phi_), theta(n_theta_), weight(n_theta_) {
    for (int i = 0; i < n_theta; ++i)
      theta[i] = Real(EIGEN_PI) * (i + Real(0.5)) / n_theta;
    // Solve sum_i w_i P_n(cos theta_i) = 2*delta_{n0} for n < n_theta.
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> A(n_theta, n_theta);
    Eigen::Matrix<Real, Eigen::Dynamic, 1> b =
        Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(n_theta);
    b(0) = 2;
    for (int i = 0; i < n_theta; ++i) {
      const Real x = std::cos(theta[i]);
      Real p0 = 1, p1 = x;
      A(0, i) = p0;
      if (n_theta > 1) A(1, i) = p1;
      for (int n = 2; n < n_theta; ++n) {
        const Real p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
        A(n, i) = p2;
        p0 = p1;
        p1 = p2;
      }
    }
    Eigen::Matrix<Real, Eigen::Dynamic, 1> w = A.fullPivLu().solve(b);
    for (int i = 0; i < n_theta; ++i) weight[i] = w(i);
  }

  Real phi(int j) const { return Real(2) * Real(EIGEN_PI) * j / n_phi; }
};

/// SH analysis of samples F(theta_i, phi_j) laid out as (n_theta, n_phi).
/// Returns coefficients indexed l*(l+1)+m for l <= lmax.
template <class Real>
std::vector<Cx<Real>> sh_analyze(const SphereGrid<Real>& g, const CGrid<Real>& samples,
                                 int lmax) {
  std::vector<Cx<Real>> coeffs((lmax + 1) * (lmax + 1));
  const Real dphi = Real(2) * Real(EIGEN_PI) / g.n_phi;
  for (int i = 0; i < g.n_theta; ++i) {
    auto P = detail::legendre_table<Real>(lmax, std::cos(g.theta[i]));
    // accumulate azimuthal sums sum_j F e^{-i m phi_j} for m = -lmax..lmax
    std::vector<Cx<Real>> az(2 * lmax + 1, Cx<Real>(0));
    for (int j = 0; j < g.n_phi; ++j) {
      const Cx<Real> v = samples(i, j);
      for (int m = -lmax; m <= lmax; ++m)
        az[m + lmax] += v * std::polar(Real(1), -m * g.phi(j));
    }
    for (int l = 0; l <= lmax; ++l)
      for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        Real p = P[l * (l + 1) / 2 + am];
        if (m < 0 && (am % 2)) p = -p;  // conj(Y_l^{-m}) sign
        coeffs[l * (l + 1) + m] += g.weight[i] * dphi * p * az[m + lmax];
      }
  }
  return coeffs;
}

template <class Real>
CGrid<Real> sh_synthesize(const SphereGrid<Real>& g,
                          const std::vector<Cx<Real>>& coeffs, int lmax) {
  CGrid<Real> out = CGrid<Real>::Zero(g.n_theta, g.n_phi);
  for (int i = 0; i < g.n_theta; ++i)
    for (int j = 0; j < g.n_phi; ++j) {
      Cx<Real> acc(0);
      for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m)
          acc += coeffs[l * (l + 1) + m] * sph_harm(l, m, g.theta[i], g.phi(j));
      out(i, j) = acc;
    }
  return out;
}

/// 3D filter as per-shell spherical-harmonic coefficients f_l^m(r), shells at
/// half-integer radii r_j = (j+0.5)*r_max/n_radii.
template <class Real>
struct SphFilter3 {
  int K = 0;        // max degree l
  int n_radii = 0;
  Real r_max = 0;
  CGrid<Real> coeffs;  // (n_radii, (K+1)^2), column l*(l+1)+m

  Cx<Real> coeff(int shell, int l, int m) const { return coeffs(shell, l * (l + 1) + m); }

  /// Linear interpolation of f_l^m at radius r (clamped to the shell range).
  Cx<Real> radial(int l, int m, Real r) const {
    Real u = r / r_max * n_radii - Real(0.5);
    if (u < 0) u = 0;
    if (u > n_radii - 1) u = Real(n_radii - 1);
    const int j0 = static_cast<int>(u);
    const int j1 = std::min(j0 + 1, n_radii - 1);
    const Real t = u - j0;
    return (1 - t) * coeff(j0, l, m) + t * coeff(j1, l, m);
  }
};

using SphFilter3d = SphFilter3<double>;

template <class Real>
SphFilter3<Real> decompose_rotation3(const Field3<Real>& volume, Real cx, Real cy,
                                     Real cz, int K, int n_radii, Real r_max,
                                     int n_theta = 0, int n_phi = 0) {
  if (n_theta == 0) n_theta = 2 * (K + 1);
  if (n_phi == 0) n_phi = 2 * (K + 1);
  if (n_theta < 2 * (K + 1) || n_phi < 2 * (K + 1))
    throw std::invalid_argument("insufficient angular sampling for band limit");
  SphereGrid<Real> g(n_theta, n_phi);
  SphFilter3<Real> f;
  f.K = K;
  f.n_radii = n_radii;
  f.r_max = r_max;
  f.coeffs.resize(n_radii, (K + 1) * (K + 1));
  CGrid<Real> samples(n_theta, n_phi);
  for (int j = 0; j < n_radii; ++j) {
    const Real r = (j + Real(0.5)) * r_max / n_radii;
    for (int i = 0; i < n_theta; ++i)
      for (int jj = 0; jj < n_phi; ++jj) {
        const Real th = g.theta[i], ph = g.phi(jj);
        samples(i, jj) = volume.sample(cx + r * std::sin(th) * std::cos(ph),
                                       cy + r * std::sin(th) * std::sin(ph),
                                       cz + r * std::cos(th));
      }
    auto c = sh_analyze(g, samples, K);
    for (int idx = 0; idx < (K + 1) * (K + 1); ++idx) f.coeffs(j, idx) = c[idx];
  }
  return f;
}

/// Render f_l^{m}(r) * Y_l^{m'} on a voxel grid centered at (cx,cy,cz).
/// The center voxel carries only the isotropic l=0 term: the direction is
/// undefined at the origin, and any l>0 value there would move under the
/// per-voxel rotations while a rotation fixes the origin.
template <class Real>
Field3<Real> render_sph_component(const SphFilter3<Real>& f, int l, int m_radial,
                                  int m_angular, int nx, int ny, int nz, Real cx,
                                  Real cy, Real cz) {
  Field3<Real> out(nx, ny, nz);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const Real dx = x - cx, dy = y - cy, dz = z - cz;
        const Real r = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (r > f.r_max) continue;
        if (r <= Real(1e-9) && l > 0) continue;
        const Real theta = r > 0 ? std::acos(std::clamp(dz / r, Real(-1), Real(1)))
                                 : Real(0);
        const Real phi = std::atan2(dy, dx);
        out.at(x, y, z) = f.radial(l, m_radial, r) * sph_harm(l, m_angular, theta, phi);
      }
  return out;
}

/// Synthesize the filter (optionally truncated to a set of degrees l).
template <class Real>
Field3<Real> reconstruct3(const SphFilter3<Real>& f, int nx, int ny, int nz, Real cx,
                          Real cy, Real cz,
                          const std::optional<std::vector<int>>& degrees = {}) {
  Field3<Real> out(nx, ny, nz);
  for (int l = 0; l <= f.K; ++l) {
    if (degrees && std::find(degrees->begin(), degrees->end(), l) == degrees->end())
      continue;
    for (int m = -l; m <= l; ++m) {
      Field3<Real> c = render_sph_component(f, l, m, m, nx, ny, nz, cx, cy, cz);
      for (size_t i = 0; i < out.values.size(); ++i) out.values[i] += c.values[i];
    }
  }
  return out;
}

}  // namespace xconv
