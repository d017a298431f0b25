#pragma once

#include <random>
#include <xconv/xconv.hpp>

namespace xt {

using namespace xconv;

inline double rel_l2(const CGrid<double>& a, const CGrid<double>& b) {
  const double n = std::sqrt((a - b).abs2().sum());
  const double d = std::sqrt(b.abs2().sum());
  return d > 0 ? n / d : n;
}

inline double rel_l2(const Field2d& a, const Field2d& b) {
  return rel_l2(a.values, b.values);
}

inline double rel_l2(const Field3d& a, const Field3d& b) {
  double n = 0, d = 0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    n += std::norm(a.values[i] - b.values[i]);
    d += std::norm(b.values[i]);
  }
  return d > 0 ? std::sqrt(n / d) : std::sqrt(n);
}

inline Field2d random_field(int w, int h, std::mt19937_64& rng, bool complex_valued = false) {
  std::uniform_real_distribution<double> u(-1, 1);
  Field2d f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      f.at(x, y) = complex_valued ? Cx<double>(u(rng), u(rng)) : Cx<double>(u(rng), 0);
  return f;
}

/// Random smooth compact filter: a few Gaussian bumps under a radial envelope
/// that decays well inside the support radius.
inline Field2d random_smooth_filter(int radius, std::mt19937_64& rng,
                                    int n_bumps = 6, double envelope_frac = 0.35) {
  std::uniform_real_distribution<double> u(-1, 1);
  const int S = 2 * radius + 1;
  Field2d f(S, S);
  struct Bump {
    double x, y, a, s;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < n_bumps; ++i)
    bumps.push_back({u(rng) * radius * 0.5, u(rng) * radius * 0.5, u(rng),
                     1.2 + 0.8 * std::abs(u(rng))});
  const double env = envelope_frac * radius;
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x) {
      double v = 0;
      for (const auto& b : bumps) {
        const double dx = x - b.x, dy = y - b.y;
        v += b.a * std::exp(-(dx * dx + dy * dy) / (2 * b.s * b.s));
      }
      v *= std::exp(-(double(x) * x + double(y) * y) / (2 * env * env));
      f.at(x + radius, y + radius) = v;
    }
  return f;
}

inline Field3d random_field3(int nx, int ny, int nz, std::mt19937_64& rng,
                             bool complex_valued = false) {
  std::uniform_real_distribution<double> u(-1, 1);
  Field3d f(nx, ny, nz);
  for (auto& v : f.values)
    v = complex_valued ? Cx<double>(u(rng), u(rng)) : Cx<double>(u(rng), 0);
  return f;
}

/// Random smooth compact 3D filter: Gaussian bumps under a radial envelope.
inline Field3d random_smooth_filter3(int radius, std::mt19937_64& rng,
                                     int n_bumps = 6, double envelope_frac = 0.4) {
  std::uniform_real_distribution<double> u(-1, 1);
  const int S = 2 * radius + 1;
  Field3d f(S, S, S);
  struct Bump {
    double x, y, z, a, s;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < n_bumps; ++i)
    bumps.push_back({u(rng) * radius * 0.5, u(rng) * radius * 0.5,
                     u(rng) * radius * 0.5, u(rng), 1.0 + 0.6 * std::abs(u(rng))});
  const double env = envelope_frac * radius;
  for (int z = -radius; z <= radius; ++z)
    for (int y = -radius; y <= radius; ++y)
      for (int x = -radius; x <= radius; ++x) {
        double v = 0;
        for (const auto& b : bumps) {
          const double dx = x - b.x, dy = y - b.y, dz = z - b.z;
          v += b.a * std::exp(-(dx * dx + dy * dy + dz * dz) / (2 * b.s * b.s));
        }
        v *= std::exp(-(double(x) * x + double(y) * y + double(z) * z) /
                      (2 * env * env));
        f.at(x + radius, y + radius, z + radius) = v;
      }
  return f;
}

inline XformFieldd constant_rotation3_field(int nx, int ny, int nz,
                                            const Eigen::Quaterniond& q) {
  std::vector<Eigen::Quaterniond> qs(size_t(nx) * ny * nz, q);
  return XformFieldd::rotation3d(nx, ny, nz, std::move(qs));
}

inline XformFieldd random_rotation_field(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-EIGEN_PI, EIGEN_PI);
  RGrid<double> a(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) a(y, x) = u(rng);
  return XformFieldd::rotation(a);
}

inline XformFieldd random_scale_field(int w, int h, std::mt19937_64& rng,
                                      double lo = 0.5, double hi = 2.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  RGrid<double> s(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) s(y, x) = std::exp(u(rng));
  return XformFieldd::scaling(s);
}

inline Eigen::Quaterniond random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

inline XformFieldd random_rotation3_field(int nx, int ny, int nz,
                                          std::mt19937_64& rng) {
  std::vector<Eigen::Quaterniond> qs;
  qs.reserve(size_t(nx) * ny * nz);
  for (int i = 0; i < nx * ny * nz; ++i) qs.push_back(random_quaternion(rng));
  return XformFieldd::rotation3d(nx, ny, nz, std::move(qs));
}

inline XformFieldd constant_rotation_field(int w, int h, double angle) {
  RGrid<double> a = RGrid<double>::Constant(h, w, angle);
  return XformFieldd::rotation(a);
}

inline XformFieldd constant_scale_field(int w, int h, double s) {
  RGrid<double> a = RGrid<double>::Constant(h, w, s);
  return XformFieldd::scaling(a);
}

/// Mean orientation of image structure via the smoothed structure tensor,
/// restricted to pixels whose tensor coherence exceeds the cutoff.  Returns
/// per-pixel orientation (of the dominant image structure, i.e. streak
/// direction) and coherence.
struct StructureTensorField {
  RGrid<double> orientation;  // radians, direction of least intensity change
  RGrid<double> coherence;    // (l1-l2)/(l1+l2), in [0,1]
};

inline StructureTensorField structure_tensor(const Field2d& img, double sigma = 2.0) {
  GradientFieldd g = gradient(img);
  const int h = img.height(), w = img.width();
  RGrid<double> jxx(h, w), jxy(h, w), jyy(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double m = g.magnitude(y, x), th = g.direction(y, x);
      const double gx = m * std::cos(th), gy = m * std::sin(th);
      jxx(y, x) = gx * gx;
      jxy(y, x) = gx * gy;
      jyy(y, x) = gy * gy;
    }
  jxx = xconv::detail::gaussian_blur(jxx, sigma);
  jxy = xconv::detail::gaussian_blur(jxy, sigma);
  jyy = xconv::detail::gaussian_blur(jyy, sigma);
  StructureTensorField out;
  out.orientation.resize(h, w);
  out.coherence.resize(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double a = jxx(y, x), b = jxy(y, x), c = jyy(y, x);
      const double tr = a + c;
      const double det = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4 * b * b));
      // gradient-dominant direction is the major eigenvector; streaks run
      // perpendicular to it
      const double grad_dir = 0.5 * std::atan2(2 * b, a - c);
      out.orientation(y, x) = normalize_angle(grad_dir + EIGEN_PI / 2);
      out.coherence(y, x) = tr > 1e-12 ? det / tr : 0.0;
    }
  return out;
}

/// Absolute angular distance between two undirected orientations (mod pi).
inline double orientation_distance(double a, double b) {
  const double pi = EIGEN_PI;
  double d = std::fmod(std::abs(a - b), pi);
  return std::min(d, pi - d);
}

}  // namespace xt
