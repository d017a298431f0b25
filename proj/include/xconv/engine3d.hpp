#pragma once

#include <xconv/engine.hpp>
#include <xconv/sph.hpp>
#include <xconv/wigner.hpp>

namespace xconv {

namespace detail {

template <class Real>
std::vector<int> plan_degrees(int K, const XConvPlan& plan) {
  std::vector<int> all;
  for (int l = 0; l <= K; ++l) all.push_back(l);
  return plan_components(all, plan);
}

template <class Real>
std::vector<std::array<Real, 3>> voxel_eulers(const XformField<Real>& T) {
  std::vector<std::array<Real, 3>> e(T.quats.size());
  for (size_t i = 0; i < T.quats.size(); ++i) e[i] = euler_zyz(T.quats[i]);
  return e;
}

}  // namespace detail

/// Brute-force extended correlation on a voxel grid; the filter is warped by
/// trilinear resampling under the per-voxel rotation.
template <class Real>
Response3<Real> xcorr_brute_3d(const Field3<Real>& H, const XformField<Real>& T,
                               const Field3<Real>& F, Real fcx, Real fcy, Real fcz,
                               Real eps) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  Response3<Real> r;
  r.plan.mode = XMode::correlation;
  r.plan.group = XformKind::rotation3;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(eps));
  for (int pz = 0; pz < H.nz; ++pz)
    for (int py = 0; py < H.ny; ++py)
      for (int px = 0; px < H.nx; ++px) {
        const Eigen::Matrix<Real, 3, 3> Rinv =
            T.quat(px, py, pz).toRotationMatrix().transpose();
        Cx<Real> acc(0);
        for (int qz = std::max(0, pz - R); qz <= std::min(H.nz - 1, pz + R); ++qz)
          for (int qy = std::max(0, py - R); qy <= std::min(H.ny - 1, py + R); ++qy)
            for (int qx = std::max(0, px - R); qx <= std::min(H.nx - 1, px + R); ++qx) {
              const Eigen::Matrix<Real, 3, 1> d(Real(qx - px), Real(qy - py),
                                                Real(qz - pz));
              if (d.squaredNorm() > eps * eps) continue;
              const Eigen::Matrix<Real, 3, 1> u = Rinv * d;
              acc += H.at(qx, qy, qz) *
                     std::conj(F.sample(fcx + u.x(), fcy + u.y(), fcz + u.z()));
            }
        r.output.at(px, py, pz) = acc;
      }
  return r;
}

template <class Real>
Response3<Real> xconv_brute_3d(const Field3<Real>& H, const XformField<Real>& T,
                               const Field3<Real>& F, Real fcx, Real fcy, Real fcz,
                               Real eps) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  Response3<Real> r;
  r.plan.mode = XMode::convolution;
  r.plan.group = XformKind::rotation3;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(eps));
  for (int qz = 0; qz < H.nz; ++qz)
    for (int qy = 0; qy < H.ny; ++qy)
      for (int qx = 0; qx < H.nx; ++qx) {
        const Cx<Real> hv = H.at(qx, qy, qz);
        if (hv == Cx<Real>(0)) continue;
        const Eigen::Matrix<Real, 3, 3> Rinv =
            T.quat(qx, qy, qz).toRotationMatrix().transpose();
        for (int pz = std::max(0, qz - R); pz <= std::min(H.nz - 1, qz + R); ++pz)
          for (int py = std::max(0, qy - R); py <= std::min(H.ny - 1, qy + R); ++py)
            for (int px = std::max(0, qx - R); px <= std::min(H.nx - 1, qx + R); ++px) {
              const Eigen::Matrix<Real, 3, 1> d(Real(px - qx), Real(py - qy),
                                                Real(pz - qz));
              if (d.squaredNorm() > eps * eps) continue;
              const Eigen::Matrix<Real, 3, 1> u = Rinv * d;
              r.output.at(px, py, pz) +=
                  hv * F.sample(fcx + u.x(), fcy + u.y(), fcz + u.z());
            }
      }
  return r;
}

namespace detail {

/// Dense (radius, theta, phi) lookup table of the band-limited reconstruction.
/// Radial nodes sit on an integer grid with several rings per coefficient
/// shell, aligned with the shell midpoints, so the piecewise-linear radial
/// dependence of the filter is reproduced exactly; the angular density alone
/// bounds the lookup error.
template <class Real>
struct SphereTable {
  int n_r = 0, n_theta = 0, n_phi = 0;  // n_r+1 radial nodes, r_i = i*r_max/n_r
  Real r_max = 0;
  std::vector<Cx<Real>> values;  // ((i_r * n_theta) + i_th) * n_phi + i_ph

  const Cx<Real>& at(int ir, int it, int ip) const {
    return values[(static_cast<size_t>(ir) * n_theta + it) * n_phi + ip];
  }
};

template <class Real>
SphereTable<Real> sphere_table(const SphFilter3<Real>& F, int n_theta = 0,
                               int n_phi = 0) {
  SphereTable<Real> t;
  t.n_r = 16 * F.n_radii;
  t.n_theta = n_theta > 0 ? n_theta : 96;
  t.n_phi = n_phi > 0 ? n_phi : 192;
  t.r_max = F.r_max;
  t.values.resize(static_cast<size_t>(t.n_r + 1) * t.n_theta * t.n_phi);
  const int K = F.K;
  std::vector<Cx<Real>> rad((K + 1) * (K + 1));
  for (int ir = 0; ir <= t.n_r; ++ir) {
    const Real r = ir * F.r_max / t.n_r;
    if (ir == 0) {
      // the origin carries only the isotropic term (matching the renderer)
      const Cx<Real> v =
          F.radial(0, 0, Real(0)) / std::sqrt(Real(4) * Real(EIGEN_PI));
      for (int it = 0; it < t.n_theta; ++it)
        for (int ip = 0; ip < t.n_phi; ++ip)
          t.values[(static_cast<size_t>(it)) * t.n_phi + ip] = v;
      continue;
    }
    for (int l = 0; l <= K; ++l)
      for (int m = -l; m <= l; ++m) rad[l * (l + 1) + m] = F.radial(l, m, r);
    for (int it = 0; it < t.n_theta; ++it) {
      const Real theta = Real(EIGEN_PI) * (it + Real(0.5)) / t.n_theta;
      auto P = legendre_table<Real>(K, std::cos(theta));
      for (int ip = 0; ip < t.n_phi; ++ip) {
        const Real phi = Real(2) * Real(EIGEN_PI) * ip / t.n_phi;
        Cx<Real> acc(0);
        for (int l = 0; l <= K; ++l)
          for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            Real p = P[l * (l + 1) / 2 + am];
            if (m < 0 && (am % 2)) p = -p;
            acc += rad[l * (l + 1) + m] * p * std::polar(Real(1), m * phi);
          }
        t.values[(static_cast<size_t>(ir) * t.n_theta + it) * t.n_phi + ip] = acc;
      }
    }
  }
  return t;
}

/// Trilinear lookup: radius clamped at the node range (0 beyond r_max),
/// theta clamped at the half-cell boundaries, phi wrapping.
template <class Real>
Cx<Real> sphere_sample(const SphereTable<Real>& t, Real r, Real theta, Real phi) {
  if (r > t.r_max) return Cx<Real>(0);
  Real u = r / t.r_max * t.n_r;
  u = std::clamp(u, Real(0), Real(t.n_r));
  const int r0 = std::min(static_cast<int>(u), t.n_r - 1);
  const Real tu = u - r0;
  Real v = theta / Real(EIGEN_PI) * t.n_theta - Real(0.5);
  v = std::clamp(v, Real(0), Real(t.n_theta - 1));
  const int t0 = std::min(static_cast<int>(v), t.n_theta - 2 >= 0 ? t.n_theta - 2 : 0);
  const Real tv = v - t0;
  Real w = phi / (Real(2) * Real(EIGEN_PI)) * t.n_phi;
  w = w - std::floor(w / t.n_phi) * t.n_phi;
  const int p0 = static_cast<int>(w) % t.n_phi;
  const int p1 = (p0 + 1) % t.n_phi;
  const Real tw = w - std::floor(w);
  auto slice = [&](int ir) {
    return (1 - tv) * ((1 - tw) * t.at(ir, t0, p0) + tw * t.at(ir, t0, p1)) +
           tv * ((1 - tw) * t.at(ir, t0 + 1, p0) + tw * t.at(ir, t0 + 1, p1));
  };
  return (1 - tu) * slice(r0) + tu * slice(r0 + 1);
}

template <class Real>
Cx<Real> rotated_table_value(const SphereTable<Real>& t,
                             const Eigen::Matrix<Real, 3, 3>& Rinv,
                             const Eigen::Matrix<Real, 3, 1>& d) {
  const Real r = d.norm();
  const Eigen::Matrix<Real, 3, 1> u = Rinv * d;
  const Real theta =
      r > 0 ? std::acos(std::clamp(u.z() / r, Real(-1), Real(1))) : Real(0);
  const Real phi = std::atan2(u.y(), u.x());
  return sphere_sample(t, r, theta, phi);
}

}  // namespace detail

/// Brute-force evaluation of a decomposed 3D filter: the per-voxel rotation is
/// applied geometrically to the lookup direction of a dense spherical table of
/// the reconstruction, with no Wigner-D algebra involved.
template <class Real>
Response3<Real> xcorr_brute_3d(const Field3<Real>& H, const XformField<Real>& T,
                               const SphFilter3<Real>& F, Real eps = 0,
                               int table_theta = 0, int table_phi = 0) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  if (eps <= 0) eps = F.r_max;
  const auto table = detail::sphere_table(F, table_theta, table_phi);
  Response3<Real> r;
  r.plan.mode = XMode::correlation;
  r.plan.group = XformKind::rotation3;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(eps));
  for (int pz = 0; pz < H.nz; ++pz)
    for (int py = 0; py < H.ny; ++py)
      for (int px = 0; px < H.nx; ++px) {
        const Eigen::Matrix<Real, 3, 3> Rinv =
            T.quat(px, py, pz).toRotationMatrix().transpose();
        Cx<Real> acc(0);
        for (int qz = std::max(0, pz - R); qz <= std::min(H.nz - 1, pz + R); ++qz)
          for (int qy = std::max(0, py - R); qy <= std::min(H.ny - 1, py + R); ++qy)
            for (int qx = std::max(0, px - R); qx <= std::min(H.nx - 1, px + R); ++qx) {
              const Eigen::Matrix<Real, 3, 1> d(Real(qx - px), Real(qy - py),
                                                Real(qz - pz));
              if (d.squaredNorm() > eps * eps) continue;
              acc += H.at(qx, qy, qz) *
                     std::conj(detail::rotated_table_value(table, Rinv, d));
            }
        r.output.at(px, py, pz) = acc;
      }
  return r;
}

template <class Real>
Response3<Real> xconv_brute_3d(const Field3<Real>& H, const XformField<Real>& T,
                               const SphFilter3<Real>& F, Real eps = 0,
                               int table_theta = 0, int table_phi = 0) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  if (eps <= 0) eps = F.r_max;
  const auto table = detail::sphere_table(F, table_theta, table_phi);
  Response3<Real> r;
  r.plan.mode = XMode::convolution;
  r.plan.group = XformKind::rotation3;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(eps));
  for (int qz = 0; qz < H.nz; ++qz)
    for (int qy = 0; qy < H.ny; ++qy)
      for (int qx = 0; qx < H.nx; ++qx) {
        const Cx<Real> hv = H.at(qx, qy, qz);
        if (hv == Cx<Real>(0)) continue;
        const Eigen::Matrix<Real, 3, 3> Rinv =
            T.quat(qx, qy, qz).toRotationMatrix().transpose();
        for (int pz = std::max(0, qz - R); pz <= std::min(H.nz - 1, qz + R); ++pz)
          for (int py = std::max(0, qy - R); py <= std::min(H.ny - 1, qy + R); ++py)
            for (int px = std::max(0, qx - R); px <= std::min(H.nx - 1, qx + R); ++px) {
              const Eigen::Matrix<Real, 3, 1> d(Real(px - qx), Real(py - qy),
                                                Real(pz - qz));
              if (d.squaredNorm() > eps * eps) continue;
              r.output.at(px, py, pz) +=
                  hv * detail::rotated_table_value(table, Rinv, d);
            }
      }
  return r;
}

/// Fast extended correlation: one 3D FFT correlation per (l, m, m') pair,
/// combined with conjugated Wigner-D entries per voxel.
template <class Real>
Response3<Real> xcorr_fast_3d(const Field3<Real>& H, const XformField<Real>& T,
                              const SphFilter3<Real>& F, XConvPlan plan = {}) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  plan.mode = XMode::correlation;
  plan.group = XformKind::rotation3;
  Response3<Real> r;
  r.plan = plan;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(F.r_max));
  const Real cx = Real(R), cy = Real(R), cz = Real(R);
  const auto eulers = detail::voxel_eulers(T);
  for (int l : detail::plan_degrees<Real>(F.K, plan)) {
    for (int m = -l; m <= l; ++m) {        // source order (radial profile)
      for (int mp = -l; mp <= l; ++mp) {   // target order (harmonic rendered)
        Field3<Real> V = render_sph_component(F, l, m, mp, 2 * R + 1, 2 * R + 1,
                                              2 * R + 1, cx, cy, cz);
        Field3<Real> G = filter3_fft(H, V, R, R, R, /*correlate=*/true);
        for (size_t i = 0; i < G.values.size(); ++i) {
          const auto& [a, b, g] = eulers[i];
          r.output.values[i] +=
              std::conj(wigner_d_entry(l, mp, m, a, b, g)) * G.values[i];
        }
        ++r.standard_ops;
      }
    }
  }
  return r;
}

/// Fast extended convolution: the signal is pre-multiplied by the Wigner-D
/// entry per voxel before each standard convolution.
template <class Real>
Response3<Real> xconv_fast_3d(const Field3<Real>& H, const XformField<Real>& T,
                              const SphFilter3<Real>& F, XConvPlan plan = {}) {
  if (T.kind != XformKind::rotation3) throw std::invalid_argument("needs a rotation3 field");
  if (T.nx != H.nx || T.ny != H.ny || T.nz != H.nz)
    throw std::invalid_argument("signal and transformation field dims differ");
  plan.mode = XMode::convolution;
  plan.group = XformKind::rotation3;
  Response3<Real> r;
  r.plan = plan;
  r.output = Field3<Real>(H.nx, H.ny, H.nz);
  const int R = static_cast<int>(std::ceil(F.r_max));
  const Real cx = Real(R), cy = Real(R), cz = Real(R);
  const auto eulers = detail::voxel_eulers(T);
  Field3<Real> pre(H.nx, H.ny, H.nz);
  for (int l : detail::plan_degrees<Real>(F.K, plan)) {
    for (int m = -l; m <= l; ++m) {
      for (int mp = -l; mp <= l; ++mp) {
        for (size_t i = 0; i < H.values.size(); ++i) {
          const auto& [a, b, g] = eulers[i];
          pre.values[i] = H.values[i] * wigner_d_entry(l, mp, m, a, b, g);
        }
        Field3<Real> V = render_sph_component(F, l, m, mp, 2 * R + 1, 2 * R + 1,
                                              2 * R + 1, cx, cy, cz);
        Field3<Real> G = filter3_fft(pre, V, R, R, R, /*correlate=*/false);
        for (size_t i = 0; i < G.values.size(); ++i)
          r.output.values[i] += G.values[i];
        ++r.standard_ops;
      }
    }
  }
  return r;
}

}  // namespace xconv
