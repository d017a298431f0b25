#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace xconv {

template <class Real>
using Cx = std::complex<Real>;

template <class Real>
using CGrid = Eigen::Array<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using RGrid = Eigen::Array<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// 2D grid of complex samples.  Index (0,0) is the top-left pixel,
/// x runs rightward (columns), y downward (rows).
template <class Real>
struct Field2 {
  using Value = std::complex<Real>;
  using Grid = CGrid<Real>;

  Grid values;  // (height rows, width cols)

  Field2() = default;
  explicit Field2(Grid v) : values(std::move(v)) {}
  Field2(int w, int h) : values(Grid::Zero(h, w)) {}

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }

  Value& at(int x, int y) { return values(y, x); }
  const Value& at(int x, int y) const { return values(y, x); }

  static Field2 zero(int w, int h) { return Field2(w, h); }

  bool is_real() const { return (values.imag() == Real(0)).all(); }

  Real max_abs() const {
    return values.size() ? values.abs().maxCoeff() : Real(0);
  }

  Real norm() const { return std::sqrt(values.abs2().sum()); }

  RGrid<Real> real_part() const { return values.real(); }

  /// Bilinear sample at a real-valued position; reads outside the grid are 0.
  Value sample(Real x, Real y) const {
    const Real fx = std::floor(x), fy = std::floor(y);
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const Real tx = x - fx, ty = y - fy;
    auto tap = [&](int xi, int yi) -> Value {
      if (xi < 0 || yi < 0 || xi >= width() || yi >= height()) return Value(0);
      return values(yi, xi);
    };
    return (Real(1) - ty) * ((Real(1) - tx) * tap(x0, y0) + tx * tap(x0 + 1, y0)) +
           ty * ((Real(1) - tx) * tap(x0, y0 + 1) + tx * tap(x0 + 1, y0 + 1));
  }
};

using Field2d = Field2<double>;

/// 3D grid of complex samples, x fastest.
template <class Real>
struct Field3 {
  using Value = std::complex<Real>;

  int nx = 0, ny = 0, nz = 0;
  std::vector<Value> values;

  Field3() = default;
  Field3(int nx_, int ny_, int nz_)
      : nx(nx_), ny(ny_), nz(nz_), values(static_cast<size_t>(nx_) * ny_ * nz_) {}

  size_t size() const { return values.size(); }
  size_t index(int x, int y, int z) const {
    return (static_cast<size_t>(z) * ny + y) * nx + x;
  }
  Value& at(int x, int y, int z) { return values[index(x, y, z)]; }
  const Value& at(int x, int y, int z) const { return values[index(x, y, z)]; }

  Real norm() const {
    Real s = 0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s);
  }
  Real max_abs() const {
    Real m = 0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }

  /// Trilinear sample; reads outside the grid are 0.
  Value sample(Real x, Real y, Real z) const {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int z0 = static_cast<int>(std::floor(z));
    const Real tx = x - x0, ty = y - y0, tz = z - z0;
    auto tap = [&](int xi, int yi, int zi) -> Value {
      if (xi < 0 || yi < 0 || zi < 0 || xi >= nx || yi >= ny || zi >= nz)
        return Value(0);
      return values[index(xi, yi, zi)];
    };
    Value out(0);
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const Real w = (dx ? tx : 1 - tx) * (dy ? ty : 1 - ty) * (dz ? tz : 1 - tz);
          if (w != 0) out += w * tap(x0 + dx, y0 + dy, z0 + dz);
        }
    return out;
  }
};

using Field3d = Field3<double>;

template <class Real>
Real normalize_angle(Real a) {
  const Real two_pi = Real(2) * Real(EIGEN_PI);
  a = std::fmod(a + Real(EIGEN_PI), two_pi);
  if (a < 0) a += two_pi;
  return a - Real(EIGEN_PI);
}

enum class XformKind { rotation2, scale2, rotation3 };

/// Per-cell transformation parameters: an angle per pixel, a scale factor
/// per pixel, or a unit quaternion per voxel.
template <class Real>
struct XformField {
  XformKind kind = XformKind::rotation2;

  RGrid<Real> angle;                           // rotation2, normalized to [-pi, pi)
  RGrid<Real> scale;                           // scale2, > 0
  RGrid<Real> log_scale;                       // cached log of scale
  int nx = 0, ny = 0, nz = 0;                  // rotation3 dims
  std::vector<Eigen::Quaternion<Real>> quats;  // rotation3, unit norm

  static XformField rotation(RGrid<Real> angles) {
    XformField f;
    f.kind = XformKind::rotation2;
    f.angle = angles.unaryExpr([](Real a) { return normalize_angle(a); });
    return f;
  }

  static XformField scaling(const RGrid<Real>& scales) {
    if (!(scales > Real(0)).all() || !scales.isFinite().all())
      throw std::invalid_argument("scale field must be strictly positive and finite");
    XformField f;
    f.kind = XformKind::scale2;
    f.scale = scales;
    f.log_scale = scales.log();
    return f;
  }

  static XformField rotation3d(int nx, int ny, int nz,
                               std::vector<Eigen::Quaternion<Real>> qs) {
    if (qs.size() != static_cast<size_t>(nx) * ny * nz)
      throw std::invalid_argument("quaternion count does not match grid dims");
    XformField f;
    f.kind = XformKind::rotation3;
    f.nx = nx;
    f.ny = ny;
    f.nz = nz;
    for (auto& q : qs) {
      if (std::abs(q.norm() - Real(1)) > Real(1e-12)) q.normalize();
    }
    f.quats = std::move(qs);
    return f;
  }

  int width() const {
    return static_cast<int>(kind == XformKind::scale2 ? scale.cols() : angle.cols());
  }
  int height() const {
    return static_cast<int>(kind == XformKind::scale2 ? scale.rows() : angle.rows());
  }
  const Eigen::Quaternion<Real>& quat(int x, int y, int z) const {
    return quats[(static_cast<size_t>(z) * ny + y) * nx + x];
  }
};

using XformFieldd = XformField<double>;

/// Per-pixel gradient magnitude and direction; direction is 0 by convention
/// where the magnitude vanishes.
template <class Real>
struct GradientField {
  RGrid<Real> magnitude;
  RGrid<Real> direction;

  int width() const { return static_cast<int>(magnitude.cols()); }
  int height() const { return static_cast<int>(magnitude.rows()); }
};

using GradientFieldd = GradientField<double>;

/// Central-difference gradient, one-sided at the borders.
template <class Real>
GradientField<Real> gradient(const Field2<Real>& image) {
  if (!image.is_real())
    throw std::invalid_argument("gradient requires real field");
  const int w = image.width(), h = image.height();
  RGrid<Real> I = image.real_part();
  GradientField<Real> g;
  g.magnitude.resize(h, w);
  g.direction.resize(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Real gx, gy;
      if (w == 1)
        gx = 0;
      else if (x == 0)
        gx = I(y, 1) - I(y, 0);
      else if (x == w - 1)
        gx = I(y, w - 1) - I(y, w - 2);
      else
        gx = (I(y, x + 1) - I(y, x - 1)) / Real(2);
      if (h == 1)
        gy = 0;
      else if (y == 0)
        gy = I(1, x) - I(0, x);
      else if (y == h - 1)
        gy = I(h - 1, x) - I(h - 2, x);
      else
        gy = (I(y + 1, x) - I(y - 1, x)) / Real(2);
      const Real m = std::sqrt(gx * gx + gy * gy);
      g.magnitude(y, x) = m;
      g.direction(y, x) = m > Real(0) ? std::atan2(gy, gx) : Real(0);
    }
  }
  return g;
}

}  // namespace xconv
