#pragma once

#include <chrono>
#include <map>
#include <xconv/fft.hpp>
#include <xconv/freq_filter.hpp>

namespace xconv {

enum class XMode { correlation, convolution };

/// Execution plan for an extended correlation/convolution.  The retained
/// component list selects frequencies k (2D groups) or degrees l (3D).
/// Boundary handling is zero-padding; the periodic flag exists for the
/// translation-equivariance test only.
struct XConvPlan {
  XMode mode = XMode::correlation;
  XformKind group = XformKind::rotation2;
  std::vector<int> components;  // empty = all retained in the filter
  bool periodic = false;
};

template <class Real>
struct Response2 {
  Field2<Real> output;
  XConvPlan plan;
  long long standard_ops = 0;  // number of standard FFT correlations/convolutions
  std::map<std::string, double> seconds;
};

template <class Real>
struct Response3 {
  Field3<Real> output;
  XConvPlan plan;
  long long standard_ops = 0;
  std::map<std::string, double> seconds;
};

namespace detail {

struct StageTimer {
  std::map<std::string, double>& out;
  std::string name;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  ~StageTimer() {
    out[name] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count();
  }
};

inline std::vector<int> plan_components(const std::vector<int>& available,
                                        const XConvPlan& plan) {
  if (plan.components.empty()) return available;
  for (int k : plan.components)
    if (std::find(available.begin(), available.end(), k) == available.end())
      throw std::invalid_argument("plan retains a component the filter lacks");
  return plan.components;
}

}  // namespace detail

// --- Brute-force evaluation (the oracle path) ------------------------------

namespace detail {

/// Dense polar resampling used as the brute-force lookup table.  Warping is
/// bilinear in polar coordinates, where a rotation is an exact angular shift
/// and a scaling is an exact radial stretch, so the table density (not the
/// warp) bounds the interpolation error.
template <class Real>
PolarGrid<Real> brute_table(const Field2<Real>& filt, Real fcx, Real fcy, Real eps,
                            int n_radii, int n_angles) {
  if (n_radii <= 0) n_radii = std::max(64, 8 * static_cast<int>(std::ceil(eps)));
  if (n_angles <= 0) n_angles = 512;
  // trigonometric upsampling makes the sub-pixel reads accurate; plain
  // bilinear reads of the pixel grid would dominate the oracle error
  const int U = 8;
  Field2<Real> up = fourier_upsample(filt, U);
  PolarGrid<Real> g;
  g.r_max = eps;
  g.values.resize(n_radii, n_angles);
  for (int j = 0; j < n_radii; ++j) {
    const Real r = g.radius(j);
    for (int m = 0; m < n_angles; ++m) {
      const Real th = Real(2) * Real(EIGEN_PI) * m / n_angles;
      g.values(j, m) = up.sample(Real(U) * (fcx + r * std::cos(th)),
                                 Real(U) * (fcy + r * std::sin(th)));
    }
  }
  return g;
}

/// Dense polar table of the continuous reconstruction (trig-exact in angle,
/// linear in radius — the same function the fast path integrates).
template <class Real>
PolarGrid<Real> synthesis_table(const FreqFilter2<Real>& F, int n_radii,
                                int n_angles) {
  // a log-radial table keeps the log-periodic phases of the scale group
  // locally linear, so bilinear lookup stays accurate near the inner radius
  const bool log_radial = F.group == XformKind::scale2;
  if (n_radii <= 0)
    n_radii = log_radial ? 512
                         : std::max(64, 16 * static_cast<int>(std::ceil(F.r_max)));
  if (n_angles <= 0) n_angles = 512;
  PolarGrid<Real> g;
  g.r_max = log_radial ? F.domain_top() : F.r_max;
  if (log_radial) {
    g.log_radial = true;
    g.r_min = F.r_min;
    g.inner_dc = inner_dc_value(F);
  }
  g.values.resize(n_radii, n_angles);
  for (int j = 0; j < n_radii; ++j) {
    const Real r = g.radius(j);
    for (int m = 0; m < n_angles; ++m) {
      const Real th = Real(2) * Real(EIGEN_PI) * m / n_angles;
      Cx<Real> acc(0);
      for (int ci = 0; ci < F.n_components(); ++ci)
        acc += component_value(F, ci, r, th);
      g.values(j, m) = acc;
    }
  }
  return g;
}

/// Transformed-filter value at offset (dx,dy): rotation shifts the angle,
/// scaling divides the radius.  On a log-radial table the filter class being
/// represented is periodic in log r, so a scaling wraps the radius across the
/// log-period instead of pushing content past the table edges.
template <class Real>
Cx<Real> table_sample(const PolarGrid<Real>& table, XformKind kind, Real param,
                      Real dx, Real dy) {
  const Real r = std::hypot(dx, dy);
  const Real th = std::atan2(dy, dx);
  if (kind == XformKind::rotation2) return polar_sample(table, r, th - param);
  if (table.log_radial) {
    // the disk below r_min is fixed by the scaling and carries the dc value;
    // outside it, wrap the scaled log-radius into [log r_min, log r_max)
    if (r < table.r_min) return table.inner_dc;
    const Real L = std::log(table.r_max / table.r_min);
    Real t = std::log(r / (param * table.r_min));
    t -= std::floor(t / L) * L;
    return polar_sample(table, table.r_min * std::exp(t), th);
  }
  return polar_sample(table, r / param, th);
}

template <class Real>
Response2<Real> brute_gather(const Field2<Real>& H, const XformField<Real>& T,
                             const PolarGrid<Real>& table, Real eps) {
  if (H.width() != T.width() || H.height() != T.height())
    throw std::invalid_argument("signal and transformation field dims differ");
  Response2<Real> r;
  r.plan.mode = XMode::correlation;
  r.plan.group = T.kind;
  r.output = Field2<Real>(H.width(), H.height());
  const int w = H.width(), h = H.height();
  for (int py = 0; py < h; ++py)
    for (int px = 0; px < w; ++px) {
      const Real param = T.kind == XformKind::rotation2 ? T.angle(py, px)
                                                        : T.scale(py, px);
      const Real reach = T.kind == XformKind::scale2 && !table.log_radial
                             ? eps * param
                             : eps;
      const int R = static_cast<int>(std::ceil(reach));
      Cx<Real> acc(0);
      for (int qy = std::max(0, py - R); qy <= std::min(h - 1, py + R); ++qy)
        for (int qx = std::max(0, px - R); qx <= std::min(w - 1, px + R); ++qx) {
          const Real dx = qx - px, dy = qy - py;
          if (dx * dx + dy * dy > reach * reach) continue;
          acc += H.values(qy, qx) *
                 std::conj(detail::table_sample(table, T.kind, param, dx, dy));
        }
      r.output.values(py, px) = acc;
    }
  return r;
}

template <class Real>
Response2<Real> brute_scatter(const Field2<Real>& H, const XformField<Real>& T,
                              const PolarGrid<Real>& table, Real eps) {
  if (H.width() != T.width() || H.height() != T.height())
    throw std::invalid_argument("signal and transformation field dims differ");
  Response2<Real> r;
  r.plan.mode = XMode::convolution;
  r.plan.group = T.kind;
  r.output = Field2<Real>(H.width(), H.height());
  const int w = H.width(), h = H.height();
  for (int qy = 0; qy < h; ++qy)
    for (int qx = 0; qx < w; ++qx) {
      const Cx<Real> hv = H.values(qy, qx);
      if (hv == Cx<Real>(0)) continue;
      const Real param = T.kind == XformKind::rotation2 ? T.angle(qy, qx)
                                                        : T.scale(qy, qx);
      const Real reach = T.kind == XformKind::scale2 && !table.log_radial
                             ? eps * param
                             : eps;
      const int R = static_cast<int>(std::ceil(reach));
      for (int py = std::max(0, qy - R); py <= std::min(h - 1, qy + R); ++py)
        for (int px = std::max(0, qx - R); px <= std::min(w - 1, qx + R); ++px) {
          const Real dx = px - qx, dy = py - qy;
          if (dx * dx + dy * dy > reach * reach) continue;
          r.output.values(py, px) +=
              hv * detail::table_sample(table, T.kind, param, dx, dy);
        }
    }
  return r;
}

}  // namespace detail

/// Brute-force extended correlation of a filter image: spatial gather with a
/// polar lookup table built from the trig-upsampled image.
template <class Real>
Response2<Real> xcorr_brute(const Field2<Real>& H, const XformField<Real>& T,
                            const Field2<Real>& F, Real fcx, Real fcy, Real eps,
                            int table_radii = 0, int table_angles = 0) {
  return detail::brute_gather(
      H, T, detail::brute_table(F, fcx, fcy, eps, table_radii, table_angles), eps);
}

template <class Real>
Response2<Real> xconv_brute(const Field2<Real>& H, const XformField<Real>& T,
                            const Field2<Real>& F, Real fcx, Real fcy, Real eps,
                            int table_radii = 0, int table_angles = 0) {
  return detail::brute_scatter(
      H, T, detail::brute_table(F, fcx, fcy, eps, table_radii, table_angles), eps);
}

/// Brute-force evaluation of a decomposed filter: the lookup table holds the
/// continuous reconstruction, so only the table density and the bilinear warp
/// separate this from the fast pipelines.
template <class Real>
Response2<Real> xcorr_brute(const Field2<Real>& H, const XformField<Real>& T,
                            const FreqFilter2<Real>& F, Real eps = 0,
                            int table_radii = 0, int table_angles = 0) {
  if (eps <= 0) eps = F.r_max;
  return detail::brute_gather(H, T, detail::synthesis_table(F, table_radii, table_angles),
                              eps);
}

template <class Real>
Response2<Real> xconv_brute(const Field2<Real>& H, const XformField<Real>& T,
                            const FreqFilter2<Real>& F, Real eps = 0,
                            int table_radii = 0, int table_angles = 0) {
  if (eps <= 0) eps = F.r_max;
  return detail::brute_scatter(H, T, detail::synthesis_table(F, table_radii, table_angles),
                               eps);
}

// --- Fast pipelines, 2D ----------------------------------------------------

namespace detail {

template <class Real>
int render_radius(const FreqFilter2<Real>& F) {
  return static_cast<int>(std::ceil(F.r_max));
}

/// Per-pixel steering phase exponent for one component.
template <class Real>
RGrid<Real> steer_phase(const XformField<Real>& T, const FreqFilter2<Real>& F, int k) {
  if (T.kind == XformKind::rotation2) return Real(k) * T.angle;
  return Real(k) * F.omega() * T.log_scale;
}

template <class Real>
void check_scale_guard(const XformField<Real>& T, const FreqFilter2<Real>& F) {
  const Real lo = F.r_min / F.domain_top(), hi = F.domain_top() / F.r_min;
  for (int y = 0; y < T.height(); ++y)
    for (int x = 0; x < T.width(); ++x) {
      const Real s = T.scale(y, x);
      if (s < lo || s > hi)
        throw std::invalid_argument(
            "scale factor " + std::to_string(s) + " at pixel (" + std::to_string(x) +
            "," + std::to_string(y) + ") outside guard band [" + std::to_string(lo) +
            "," + std::to_string(hi) + "]");
    }
}

}  // namespace detail

/// Extended correlation via per-component standard FFT correlation plus
/// per-pixel phase combination:  out(p) = sum_k e^{i*phase_k(p)} (H * F_k)(p).
template <class Real>
Response2<Real> xcorr_fast(const Field2<Real>& H, const XformField<Real>& T,
                           const FreqFilter2<Real>& F, XConvPlan plan = {}) {
  if (T.kind != F.group) throw std::invalid_argument("transformation/filter group mismatch");
  if (T.kind == XformKind::rotation3) throw std::invalid_argument("2D pipeline needs a 2D field");
  if (H.width() != T.width() || H.height() != T.height())
    throw std::invalid_argument("signal and transformation field dims differ");
  if (T.kind == XformKind::scale2) detail::check_scale_guard(T, F);
  plan.mode = XMode::correlation;
  plan.group = T.kind;
  Response2<Real> r;
  r.plan = plan;
  r.output = Field2<Real>(H.width(), H.height());
  const int R = detail::render_radius(F);
  const auto ks = detail::plan_components(F.ks, plan);
  for (int k : ks) {
    Field2<Real> Fk;
    {
      detail::StageTimer t{r.seconds, "render"};
      Fk = render_component(F, F.index_of(k), 2 * R + 1, 2 * R + 1, Real(R), Real(R));
    }
    CGrid<Real> Gk;
    {
      detail::StageTimer t{r.seconds, "fft"};
      Gk = filter2_fft(H.values, Fk.values, R, R, /*correlate=*/true, plan.periodic);
    }
    {
      detail::StageTimer t{r.seconds, "combine"};
      RGrid<Real> ph = detail::steer_phase(T, F, k);
      r.output.values += Gk * ph.unaryExpr([](Real a) {
        return Cx<Real>(std::cos(a), std::sin(a));
      });
    }
    ++r.standard_ops;
  }
  if (T.kind == XformKind::scale2) {
    // the disk r < r_min is excluded from the components; a scaling fixes the
    // origin, so it contributes a pointwise unsteered term
    r.output.values += std::conj(inner_dc_value(F)) * H.values;
  }
  return r;
}

/// Extended convolution: pre-multiply the signal by e^{-i*phase_k} and sum
/// standard FFT convolutions with the components.
template <class Real>
Response2<Real> xconv_fast(const Field2<Real>& H, const XformField<Real>& T,
                           const FreqFilter2<Real>& F, XConvPlan plan = {}) {
  if (T.kind != F.group) throw std::invalid_argument("transformation/filter group mismatch");
  if (T.kind == XformKind::rotation3) throw std::invalid_argument("2D pipeline needs a 2D field");
  if (H.width() != T.width() || H.height() != T.height())
    throw std::invalid_argument("signal and transformation field dims differ");
  if (T.kind == XformKind::scale2) detail::check_scale_guard(T, F);
  plan.mode = XMode::convolution;
  plan.group = T.kind;
  Response2<Real> r;
  r.plan = plan;
  r.output = Field2<Real>(H.width(), H.height());
  const int R = detail::render_radius(F);
  const auto ks = detail::plan_components(F.ks, plan);
  for (int k : ks) {
    Field2<Real> Fk;
    CGrid<Real> Gk;
    {
      detail::StageTimer t{r.seconds, "render"};
      Fk = render_component(F, F.index_of(k), 2 * R + 1, 2 * R + 1, Real(R), Real(R));
    }
    {
      detail::StageTimer t{r.seconds, "premultiply"};
      RGrid<Real> ph = detail::steer_phase(T, F, k);
      Gk = H.values * ph.unaryExpr([](Real a) {
        return Cx<Real>(std::cos(-a), std::sin(-a));
      });
    }
    {
      detail::StageTimer t{r.seconds, "fft"};
      Gk = filter2_fft(Gk, Fk.values, R, R, /*correlate=*/false, plan.periodic);
    }
    {
      detail::StageTimer t{r.seconds, "combine"};
      r.output.values += Gk;
    }
    ++r.standard_ops;
  }
  if (T.kind == XformKind::scale2) {
    r.output.values += inner_dc_value(F) * H.values;
  }
  return r;
}

/// Normalized adaptive smoothing.  Divides the extended convolution of the
/// scale-normalized signal by the same convolution of the all-ones signal.
template <class Real>
struct SmoothResult {
  Field2<Real> output;
  long long standard_ops = 0;
  int clamped_pixels = 0;  // denominator below the floor, output forced to 0
};

template <class Real>
SmoothResult<Real> smooth_adaptive(const Field2<Real>& H, const XformField<Real>& T,
                                   const FreqFilter2<Real>& F,
                                   bool normalize_signal = true) {
  const int R = detail::render_radius(F);
  Field2<Real> full = reconstruct(F, 2 * R + 1, 2 * R + 1, Real(R), Real(R));
  const Cx<Real> integral = full.values.sum();
  if (std::abs(integral) < Real(1e-12) * std::max<Real>(1, full.max_abs()))
    throw std::invalid_argument("normalization undefined: filter has zero integral");

  Field2<Real> Ht = H, ones(H.width(), H.height());
  ones.values.setConstant(Cx<Real>(1));
  if (normalize_signal && T.kind == XformKind::scale2) {
    // scaling the filter by s scales its integral by s^2
    RGrid<Real> inv = T.scale.square().inverse();
    Ht.values = H.values * inv.template cast<Cx<Real>>();
    ones.values = inv.template cast<Cx<Real>>();
  }
  auto num = xconv_fast(Ht, T, F);
  auto den = xconv_fast(ones, T, F);

  SmoothResult<Real> out;
  out.standard_ops = num.standard_ops + den.standard_ops;
  out.output = Field2<Real>(H.width(), H.height());
  const Real floor = Real(1e-9) * den.output.max_abs();
  for (int y = 0; y < H.height(); ++y)
    for (int x = 0; x < H.width(); ++x) {
      const Cx<Real> d = den.output.values(y, x);
      if (std::abs(d) < floor) {
        ++out.clamped_pixels;
        continue;
      }
      out.output.values(y, x) = std::real(num.output.values(y, x) / d);
    }
  return out;
}

}  // namespace xconv
