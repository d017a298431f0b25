#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <xconv/contour.hpp>
#include <xconv/freq_filter.hpp>
#include <xconv/sph.hpp>

namespace xconv {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void skip_pnm_space(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline bool host_little_endian() {
  const uint16_t x = 1;
  uint8_t b;
  std::memcpy(&b, &x, 1);
  return b == 1;
}

}  // namespace detail

// --- PGM (P5, 8/16-bit, real fields) ---------------------------------------

template <class Real>
Field2<Real> read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError(path + ": not a P5 PGM");
  detail::skip_pnm_space(in);
  int w, h, maxval;
  in >> w;
  detail::skip_pnm_space(in);
  in >> h;
  detail::skip_pnm_space(in);
  in >> maxval;
  in.get();  // single whitespace before raster
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw IoError(path + ": bad PGM header");
  Field2<Real> f(w, h);
  if (maxval < 256) {
    std::vector<uint8_t> buf(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) throw IoError(path + ": truncated PGM raster");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) f.at(x, y) = Real(buf[size_t(y) * w + x]) / maxval;
  } else {
    std::vector<uint8_t> buf(static_cast<size_t>(w) * h * 2);
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (!in) throw IoError(path + ": truncated PGM raster");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const size_t i = (size_t(y) * w + x) * 2;  // big-endian per PNM
        f.at(x, y) = Real((buf[i] << 8) | buf[i + 1]) / maxval;
      }
  }
  return f;
}

/// Writes values scaled by maxval and clamped; the field must be real.
template <class Real>
void write_pgm(const std::string& path, const Field2<Real>& f, int maxval = 255) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "P5\n" << f.width() << " " << f.height() << "\n" << maxval << "\n";
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x) {
      const Real v = std::real(f.at(x, y));
      long q = std::lround(std::clamp(v, Real(0), Real(1)) * maxval);
      if (maxval < 256) {
        const uint8_t b = static_cast<uint8_t>(q);
        out.write(reinterpret_cast<const char*>(&b), 1);
      } else {
        const uint8_t b[2] = {static_cast<uint8_t>(q >> 8), static_cast<uint8_t>(q)};
        out.write(reinterpret_cast<const char*>(b), 2);
      }
    }
  if (!out) throw IoError("write failed: " + path);
}

// --- PFM (grayscale "Pf", little-endian floats, rows bottom-up) ------------
//
// Multi-plane files hold several consecutive Pf blocks of identical size:
// complex fields are two planes (real then imaginary), angle/scale fields one
// plane, quaternion fields four planes (w, x, y, z).

template <class Real>
void write_pfm_planes(const std::string& path,
                      const std::vector<RGrid<Real>>& planes) {
  if (planes.empty()) throw IoError("no planes to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& p : planes) {
    const int h = static_cast<int>(p.rows()), w = static_cast<int>(p.cols());
    out << "Pf\n" << w << " " << h << "\n-1.0\n";
    for (int y = h - 1; y >= 0; --y)
      for (int x = 0; x < w; ++x) {
        float v = static_cast<float>(p(y, x));
        out.write(reinterpret_cast<const char*>(&v), 4);
      }
  }
  if (!out) throw IoError("write failed: " + path);
}

template <class Real>
std::vector<RGrid<Real>> read_pfm_planes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<RGrid<Real>> planes;
  while (in.peek() != EOF) {
    std::string magic;
    in >> magic;
    if (magic.empty()) break;
    if (magic != "Pf") throw IoError(path + ": expected grayscale Pf plane");
    int w, h;
    float scale;
    in >> w >> h >> scale;
    in.get();
    if (w < 1 || h < 1) throw IoError(path + ": bad PFM header");
    const bool file_le = scale < 0;
    RGrid<Real> p(h, w);
    std::vector<float> row(w);
    for (int y = h - 1; y >= 0; --y) {
      in.read(reinterpret_cast<char*>(row.data()), sizeof(float) * w);
      if (!in) throw IoError(path + ": truncated PFM raster");
      for (int x = 0; x < w; ++x) {
        float v = row[x];
        if (file_le != detail::host_little_endian()) {
          char* b = reinterpret_cast<char*>(&v);
          std::swap(b[0], b[3]);
          std::swap(b[1], b[2]);
        }
        p(y, x) = Real(v);
      }
    }
    planes.push_back(std::move(p));
    while (in.peek() == '\n' || in.peek() == '\r') in.get();
  }
  if (planes.empty()) throw IoError(path + ": no PFM planes");
  return planes;
}

template <class Real>
void write_pfm(const std::string& path, const Field2<Real>& f) {
  if (f.is_real()) {
    write_pfm_planes<Real>(path, {f.real_part()});
  } else {
    write_pfm_planes<Real>(path, {f.real_part(), RGrid<Real>(f.values.imag())});
  }
}

template <class Real>
Field2<Real> read_pfm_field(const std::string& path) {
  auto planes = read_pfm_planes<Real>(path);
  if (planes.size() != 1 && planes.size() != 2)
    throw IoError(path + ": expected 1 (real) or 2 (complex) planes");
  Field2<Real> f(static_cast<int>(planes[0].cols()), static_cast<int>(planes[0].rows()));
  f.values = planes[0].template cast<Cx<Real>>();
  if (planes.size() == 2)
    f.values += Cx<Real>(0, 1) * planes[1].template cast<Cx<Real>>();
  return f;
}

template <class Real>
void write_xform(const std::string& path, const XformField<Real>& T) {
  switch (T.kind) {
    case XformKind::rotation2:
      write_pfm_planes<Real>(path, {T.angle});
      break;
    case XformKind::scale2:
      write_pfm_planes<Real>(path, {T.scale});
      break;
    case XformKind::rotation3: {
      if (T.nz != 1) throw IoError("PFM export supports single-slice quaternion fields");
      RGrid<Real> qw(T.ny, T.nx), qx(T.ny, T.nx), qy(T.ny, T.nx), qz(T.ny, T.nx);
      for (int y = 0; y < T.ny; ++y)
        for (int x = 0; x < T.nx; ++x) {
          const auto& q = T.quat(x, y, 0);
          qw(y, x) = q.w();
          qx(y, x) = q.x();
          qy(y, x) = q.y();
          qz(y, x) = q.z();
        }
      write_pfm_planes<Real>(path, {qw, qx, qy, qz});
      break;
    }
  }
}

template <class Real>
XformField<Real> read_xform(const std::string& path, XformKind kind) {
  auto planes = read_pfm_planes<Real>(path);
  switch (kind) {
    case XformKind::rotation2:
      if (planes.size() != 1) throw IoError(path + ": rotation field needs 1 plane");
      return XformField<Real>::rotation(planes[0]);
    case XformKind::scale2:
      if (planes.size() != 1) throw IoError(path + ": scale field needs 1 plane");
      return XformField<Real>::scaling(planes[0]);
    case XformKind::rotation3: {
      if (planes.size() != 4) throw IoError(path + ": quaternion field needs 4 planes");
      const int h = static_cast<int>(planes[0].rows());
      const int w = static_cast<int>(planes[0].cols());
      std::vector<Eigen::Quaternion<Real>> qs;
      qs.reserve(static_cast<size_t>(w) * h);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          qs.emplace_back(planes[0](y, x), planes[1](y, x), planes[2](y, x),
                          planes[3](y, x));
      return XformField<Real>::rotation3d(w, h, 1, std::move(qs));
    }
  }
  throw IoError("unknown transformation kind");
}

// --- Binary filter container ------------------------------------------------
//
// Layout (little-endian):
//   magic "XCF1" | u8 group (0 rot2, 1 scale2, 2 rot3) | i32 K
//   i32 n_radii | i32 n_angles | f64 r_max | f64 r_min | f64 r_domain
//   i64 n_rows | i64 n_cols | n_rows*n_cols complex<f64> coefficients

namespace detail {

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace detail

template <class Real>
void write_filter(const std::string& path, const FreqFilter2<Real>& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write("XCF1", 4);
  detail::put<uint8_t>(out, f.group == XformKind::rotation2 ? 0 : 1);
  detail::put<int32_t>(out, f.K);
  detail::put<int32_t>(out, f.n_radii);
  detail::put<int32_t>(out, f.n_angles);
  detail::put<double>(out, double(f.r_max));
  detail::put<double>(out, double(f.r_min));
  detail::put<double>(out, double(f.r_domain));
  detail::put<int64_t>(out, f.comps.rows());
  detail::put<int64_t>(out, f.comps.cols());
  for (Eigen::Index c = 0; c < f.comps.cols(); ++c)
    for (Eigen::Index r = 0; r < f.comps.rows(); ++r) {
      detail::put<double>(out, double(f.comps(r, c).real()));
      detail::put<double>(out, double(f.comps(r, c).imag()));
    }
  if (!out) throw IoError("write failed: " + path);
}

template <class Real>
FreqFilter2<Real> read_filter(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::strncmp(magic, "XCF1", 4) != 0)
    throw IoError(path + ": not a filter container");
  FreqFilter2<Real> f;
  const uint8_t tag = detail::get<uint8_t>(in);
  if (tag > 1) throw IoError(path + ": container holds a 3D filter");
  f.group = tag == 0 ? XformKind::rotation2 : XformKind::scale2;
  f.K = detail::get<int32_t>(in);
  f.n_radii = detail::get<int32_t>(in);
  f.n_angles = detail::get<int32_t>(in);
  f.r_max = Real(detail::get<double>(in));
  f.r_min = Real(detail::get<double>(in));
  f.r_domain = Real(detail::get<double>(in));
  const int64_t rows = detail::get<int64_t>(in);
  const int64_t cols = detail::get<int64_t>(in);
  f.ks = detail::retained_ks(f.K, f.group == XformKind::rotation2 ? f.n_angles
                                                                  : f.n_radii);
  if (cols != static_cast<int64_t>(f.ks.size()))
    throw IoError(path + ": component count does not match band limit");
  f.comps.resize(rows, cols);
  for (int64_t c = 0; c < cols; ++c)
    for (int64_t r = 0; r < rows; ++r) {
      const double re = detail::get<double>(in);
      const double im = detail::get<double>(in);
      f.comps(r, c) = Cx<Real>(Real(re), Real(im));
    }
  if (!in) throw IoError(path + ": truncated container");
  return f;
}

template <class Real>
void write_filter3(const std::string& path, const SphFilter3<Real>& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write("XCF1", 4);
  detail::put<uint8_t>(out, 2);
  detail::put<int32_t>(out, f.K);
  detail::put<int32_t>(out, f.n_radii);
  detail::put<int32_t>(out, 0);
  detail::put<double>(out, double(f.r_max));
  detail::put<double>(out, 0.0);
  detail::put<double>(out, 0.0);
  detail::put<int64_t>(out, f.coeffs.rows());
  detail::put<int64_t>(out, f.coeffs.cols());
  for (Eigen::Index c = 0; c < f.coeffs.cols(); ++c)
    for (Eigen::Index r = 0; r < f.coeffs.rows(); ++r) {
      detail::put<double>(out, double(f.coeffs(r, c).real()));
      detail::put<double>(out, double(f.coeffs(r, c).imag()));
    }
  if (!out) throw IoError("write failed: " + path);
}

template <class Real>
SphFilter3<Real> read_filter3(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::strncmp(magic, "XCF1", 4) != 0)
    throw IoError(path + ": not a filter container");
  if (detail::get<uint8_t>(in) != 2) throw IoError(path + ": not a 3D filter");
  SphFilter3<Real> f;
  f.K = detail::get<int32_t>(in);
  f.n_radii = detail::get<int32_t>(in);
  detail::get<int32_t>(in);
  f.r_max = Real(detail::get<double>(in));
  detail::get<double>(in);
  detail::get<double>(in);
  const int64_t rows = detail::get<int64_t>(in);
  const int64_t cols = detail::get<int64_t>(in);
  if (cols != int64_t(f.K + 1) * (f.K + 1))
    throw IoError(path + ": coefficient count does not match band limit");
  f.coeffs.resize(rows, cols);
  for (int64_t c = 0; c < cols; ++c)
    for (int64_t r = 0; r < rows; ++r) {
      const double re = detail::get<double>(in);
      const double im = detail::get<double>(in);
      f.coeffs(r, c) = Cx<Real>(Real(re), Real(im));
    }
  if (!in) throw IoError(path + ": truncated container");
  return f;
}

// --- CSV --------------------------------------------------------------------

/// Polylines as "x,y" rows; a blank line separates polylines.
template <class Real>
std::vector<Polyline<Real>> read_polylines_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Polyline<Real>> lines(1);
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty() || row.find_first_not_of(" \t\r") == std::string::npos) {
      if (!lines.back().empty()) lines.emplace_back();
      continue;
    }
    std::stringstream ss(row);
    Real x, y;
    char comma;
    if (!(ss >> x >> comma >> y)) throw IoError(path + ": bad polyline row: " + row);
    lines.back().push_back({x, y});
  }
  if (lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw IoError(path + ": no polylines");
  return lines;
}

/// Keypoints as "x,y,scale" rows (scale optional, default 1).
template <class Real>
std::vector<Eigen::Matrix<Real, 3, 1>> read_keypoints_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<Eigen::Matrix<Real, 3, 1>> pts;
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    std::stringstream ss(row);
    Real x, y, s = 1;
    char comma;
    if (!(ss >> x >> comma >> y)) throw IoError(path + ": bad keypoint row: " + row);
    ss >> comma >> s;
    pts.push_back({x, y, s});
  }
  return pts;
}

/// Correspondence ground truth as "scene_index,model_index" rows.
inline std::vector<std::pair<int, int>> read_pairs_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::pair<int, int>> pairs;
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    std::stringstream ss(row);
    int a, b;
    char comma;
    if (!(ss >> a >> comma >> b)) throw IoError(path + ": bad pair row: " + row);
    pairs.emplace_back(a, b);
  }
  return pairs;
}

}  // namespace xconv
