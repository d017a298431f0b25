#pragma once

#include <xconv/engine.hpp>

namespace xconv {

/// Discretized optimal pattern filter: a square accumulation grid of splatted
/// votes, origin at the center, radius R = ceil(eps).
template <class Real>
struct VoteFilter {
  RGrid<Real> weights;  // (2R+1, 2R+1), non-negative
  int radius = 0;
  Real eps = 0;

  int side() const { return 2 * radius + 1; }
  Real total_mass() const { return weights.sum(); }

  Field2<Real> to_field() const {
    Field2<Real> f(side(), side());
    f.values = weights.template cast<Cx<Real>>();
    return f;
  }
};

using VoteFilterd = VoteFilter<double>;

namespace detail {

template <class Real>
void splat_bilinear(RGrid<Real>& grid, Real x, Real y, Real w) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const Real tx = x - x0, ty = y - y0;
  for (int dy = 0; dy < 2; ++dy)
    for (int dx = 0; dx < 2; ++dx) {
      const int xi = x0 + dx, yi = y0 + dy;
      if (xi < 0 || yi < 0 || xi >= grid.cols() || yi >= grid.rows()) continue;
      grid(yi, xi) += w * (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty);
    }
}

}  // namespace detail

/// Splat one frame-relative vote: the offset to the center, rotated into the
/// frame whose x-axis is the local direction, weighted by w.
template <class Real>
void splat_vote(VoteFilter<Real>& f, Real offset_x, Real offset_y, Real frame_angle,
                Real w, bool nearest = false) {
  const Real c = std::cos(-frame_angle), s = std::sin(-frame_angle);
  const Real vx = c * offset_x - s * offset_y + f.radius;
  const Real vy = s * offset_x + c * offset_y + f.radius;
  if (nearest) {
    const int xi = static_cast<int>(std::lround(vx));
    const int yi = static_cast<int>(std::lround(vy));
    if (xi >= 0 && yi >= 0 && xi < f.side() && yi < f.side()) f.weights(yi, xi) += w;
    return;
  }
  detail::splat_bilinear(f.weights, vx, vy, w);
}

/// Build the vote filter from an explicit weight field and frame field:
/// every q with weight(q) > 0 and |p-q| <= eps casts a vote at the position
/// of p relative to the frame at q.
template <class Real>
VoteFilter<Real> build_vote_filter(const RGrid<Real>& weight, const RGrid<Real>& frame,
                                   Real px, Real py, Real eps, bool nearest = false) {
  if (!(eps > Real(0))) throw std::invalid_argument("support radius must be > 0");
  VoteFilter<Real> f;
  f.eps = eps;
  f.radius = static_cast<int>(std::ceil(eps));
  f.weights = RGrid<Real>::Zero(f.side(), f.side());
  const int w = static_cast<int>(weight.cols()), h = static_cast<int>(weight.rows());
  bool any = false;
  for (int qy = 0; qy < h; ++qy)
    for (int qx = 0; qx < w; ++qx) {
      const Real m = weight(qy, qx);
      if (m <= Real(0)) continue;
      const Real dx = px - qx, dy = py - qy;
      if (dx * dx + dy * dy > eps * eps) continue;
      splat_vote(f, dx, dy, frame(qy, qx), m, nearest);
      any = true;
    }
  if (!any) throw std::invalid_argument("degenerate pattern: no votes in support");
  return f;
}

/// Optimal filter of a pattern: votes weighted by gradient magnitude in the
/// gradient-direction frame.
template <class Real>
VoteFilter<Real> build_optimal_filter(const Field2<Real>& pattern, Real px, Real py,
                                      Real eps, bool nearest = false) {
  if (px < 0 || py < 0 || px >= pattern.width() || py >= pattern.height())
    throw std::invalid_argument("center must lie inside the pattern");
  GradientField<Real> g = gradient(pattern);
  return build_vote_filter(g.magnitude, g.direction, px, py, eps, nearest);
}

template <class Real>
struct Peak {
  int x = 0, y = 0;
  Real value = 0;
};

/// Non-maximum suppression: local maxima within the given radius, at or above
/// threshold_frac of the global maximum, sorted descending.
template <class Real>
std::vector<Peak<Real>> find_peaks(const RGrid<Real>& resp, Real radius,
                                   Real threshold_frac = Real(0.5)) {
  std::vector<Peak<Real>> peaks;
  const int w = static_cast<int>(resp.cols()), h = static_cast<int>(resp.rows());
  const Real thresh = threshold_frac * resp.maxCoeff();
  const int R = std::max(1, static_cast<int>(std::ceil(radius)));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Real v = resp(y, x);
      if (v < thresh) continue;
      bool best = true;
      for (int dy = -R; dy <= R && best; ++dy)
        for (int dx = -R; dx <= R && best; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (dx * dx + dy * dy > radius * radius) continue;
          const int xi = x + dx, yi = y + dy;
          if (xi < 0 || yi < 0 || xi >= w || yi >= h) continue;
          const Real o = resp(yi, xi);
          if (o > v || (o == v && (dy < 0 || (dy == 0 && dx < 0)))) best = false;
        }
      if (best) peaks.push_back({x, y, v});
    }
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  return peaks;
}

template <class Real>
struct DetectionResult {
  Field2<Real> response;  // real-valued vote accumulation
  std::vector<Peak<Real>> peaks;
  long long standard_ops = 0;
};

/// Generalized-Hough pattern detection: gradient magnitudes vote through the
/// pattern's optimal filter, steered by the gradient directions.
template <class Real>
DetectionResult<Real> detect_pattern(const Field2<Real>& image,
                                     const VoteFilter<Real>& filter, int K,
                                     int n_radii = 0, int n_angles = 0) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  GradientField<Real> g = gradient(image);
  Field2<Real> H(image.width(), image.height());
  H.values = g.magnitude.template cast<Cx<Real>>();
  XformField<Real> T = XformField<Real>::rotation(g.direction);

  const int R = filter.radius;
  if (n_radii == 0) n_radii = std::max(4, 2 * R);
  if (n_angles == 0) n_angles = std::max(16, 8 * ((R + 1) / 2) * 2);
  FreqFilter2<Real> F = decompose_rotation2(filter.to_field(), Real(R), Real(R), K,
                                            n_radii, n_angles, Real(R) + Real(0.5));
  auto resp = xconv_fast(H, T, F);

  DetectionResult<Real> out;
  out.standard_ops = resp.standard_ops;
  out.response = Field2<Real>(image.width(), image.height());
  out.response.values = resp.output.values.real().template cast<Cx<Real>>();
  out.peaks = find_peaks<Real>(resp.output.values.real(), filter.eps / 2);
  return out;
}

}  // namespace xconv
