#pragma once

#include <xconv/vote_filter.hpp>

namespace xconv {

/// Planar polyline, one point per entry.
template <class Real>
using Polyline = std::vector<Eigen::Matrix<Real, 2, 1>>;

/// Rasterized contour scene: a smoothed occupancy signal plus the smoothed
/// normal-direction field, defined wherever the signal is above threshold.
template <class Real>
struct ContourScene {
  Field2<Real> signal;       // >= 0
  RGrid<Real> normal_angle;  // radians
  RGrid<Real> coverage;      // smoothed magnitude of the normal vector field
  Real sigma = Real(1.5);

  int width() const { return signal.width(); }
  int height() const { return signal.height(); }
};

using ContourScened = ContourScene<double>;

namespace detail {

template <class Real>
RGrid<Real> gaussian_blur(const RGrid<Real>& in, Real sigma) {
  const int R = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
  Eigen::Matrix<Real, Eigen::Dynamic, 1> k(2 * R + 1);
  for (int i = -R; i <= R; ++i) k(i + R) = std::exp(-Real(i * i) / (2 * sigma * sigma));
  k /= k.sum();
  const int h = static_cast<int>(in.rows()), w = static_cast<int>(in.cols());
  RGrid<Real> tmp = RGrid<Real>::Zero(h, w), out = RGrid<Real>::Zero(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Real acc = 0;
      for (int i = -R; i <= R; ++i) {
        const int xi = x + i;
        if (xi >= 0 && xi < w) acc += k(i + R) * in(y, xi);
      }
      tmp(y, x) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      Real acc = 0;
      for (int i = -R; i <= R; ++i) {
        const int yi = y + i;
        if (yi >= 0 && yi < h) acc += k(i + R) * tmp(yi, x);
      }
      out(y, x) = acc;
    }
  return out;
}

}  // namespace detail

/// Rasterize polylines into a scene: unit-width stamping of each segment plus
/// the segment normal accumulated as a vector field, both blurred by a narrow
/// Gaussian.  Normals point to the left of the direction of travel.
template <class Real>
ContourScene<Real> rasterize_contours(const std::vector<Polyline<Real>>& lines,
                                      int width, int height, Real sigma = Real(1.5)) {
  RGrid<Real> sig = RGrid<Real>::Zero(height, width);
  RGrid<Real> nxs = RGrid<Real>::Zero(height, width);
  RGrid<Real> nys = RGrid<Real>::Zero(height, width);
  auto stamp = [&](int x, int y, Real nx, Real ny) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    sig(y, x) = Real(1);
    nxs(y, x) += nx;
    nys(y, x) += ny;
  };
  for (const auto& line : lines) {
    for (size_t i = 0; i + 1 < line.size(); ++i) {
      const auto a = line[i], b = line[i + 1];
      const Real len = (b - a).norm();
      if (len == Real(0)) continue;
      const Real dx = (b.x() - a.x()) / len, dy = (b.y() - a.y()) / len;
      const Real nx = dy, ny = -dx;  // left-hand normal
      const int steps = std::max(1, static_cast<int>(std::ceil(len)));
      for (int s = 0; s <= steps; ++s) {
        const Real t = Real(s) / steps;
        stamp(static_cast<int>(std::lround(a.x() + t * (b.x() - a.x()))),
              static_cast<int>(std::lround(a.y() + t * (b.y() - a.y()))), nx, ny);
      }
    }
  }
  ContourScene<Real> scene;
  scene.sigma = sigma;
  RGrid<Real> ssig = detail::gaussian_blur(sig, sigma);
  RGrid<Real> snx = detail::gaussian_blur(nxs, sigma);
  RGrid<Real> sny = detail::gaussian_blur(nys, sigma);
  scene.signal = Field2<Real>(width, height);
  scene.signal.values = ssig.template cast<Cx<Real>>();
  scene.normal_angle.resize(height, width);
  scene.coverage.resize(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      scene.coverage(y, x) = std::sqrt(snx(y, x) * snx(y, x) + sny(y, x) * sny(y, x));
      scene.normal_angle(y, x) =
          scene.coverage(y, x) > Real(0) ? std::atan2(sny(y, x), snx(y, x)) : Real(0);
    }
  return scene;
}

template <class Real>
struct ContourMatch {
  int x = 0, y = 0;    // placement of the query region center in the target
  Real angle = 0;      // refined rotation, radians
  Real score = 0;      // extended-convolution peak value
};

namespace detail {

/// Angle minimizing the L2 difference between the rotated query patch and the
/// target patch, over a uniform angle grid.
template <class Real>
Real refine_rotation(const PolarGrid<Real>& query, const PolarGrid<Real>& target,
                     int n_steps = 360) {
  Real best = 0, best_err = std::numeric_limits<Real>::max();
  const int na = query.n_angles();
  for (int s = 0; s < n_steps; ++s) {
    const Real phi = Real(2) * Real(EIGEN_PI) * s / n_steps;
    Real err = 0;
    for (int j = 0; j < query.n_radii(); ++j)
      for (int m = 0; m < na; ++m) {
        const Real theta = Real(2) * Real(EIGEN_PI) * m / na;
        const Cx<Real> q = polar_sample(query, query.radius(j), theta - phi);
        err += std::norm(target.values(j, m) - q);
      }
    if (err < best_err) {
      best_err = err;
      best = phi;
    }
  }
  return normalize_angle(best);
}

}  // namespace detail

/// Complement matching: the filter is built from the query with negated
/// normals, scattered over the target; top peaks are refined by 1D angular
/// correlation.
template <class Real>
std::vector<ContourMatch<Real>> match_contours(const ContourScene<Real>& query,
                                               const ContourScene<Real>& target,
                                               Real qx, Real qy, Real eps, int K,
                                               int top_n = 9) {
  RGrid<Real> weight = query.signal.real_part();
  // oppositely oriented gradient fields: negate the frame
  RGrid<Real> frame = query.normal_angle.unaryExpr(
      [](Real a) { return normalize_angle(a + Real(EIGEN_PI)); });
  VoteFilter<Real> vf;
  try {
    vf = build_vote_filter(weight, frame, qx, qy, eps);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("empty contour region");
  }

  Field2<Real> H = target.signal;
  XformField<Real> T = XformField<Real>::rotation(target.normal_angle);
  const int R = vf.radius;
  const int n_radii = std::max(4, 2 * R);
  const int n_angles = std::max(32, 8 * ((R + 3) / 4) * 4);
  FreqFilter2<Real> F = decompose_rotation2(vf.to_field(), Real(R), Real(R), K,
                                            n_radii, n_angles, Real(R) + Real(0.5));
  auto resp = xconv_fast(H, T, F);
  RGrid<Real> real = resp.output.values.real();
  auto peaks = find_peaks<Real>(real, eps / 2, Real(0.1));

  const int nr_ref = std::max(8, R);
  const int na_ref = 64;
  PolarGrid<Real> qpatch =
      resample_polar(query.signal, qx, qy, nr_ref, na_ref, eps);
  std::vector<ContourMatch<Real>> out;
  for (const auto& p : peaks) {
    if (static_cast<int>(out.size()) >= top_n) break;
    PolarGrid<Real> tpatch =
        resample_polar(target.signal, Real(p.x), Real(p.y), nr_ref, na_ref, eps);
    ContourMatch<Real> m;
    m.x = p.x;
    m.y = p.y;
    m.score = p.value;
    m.angle = detail::refine_rotation(qpatch, tpatch);
    out.push_back(m);
  }
  return out;
}

}  // namespace xconv
