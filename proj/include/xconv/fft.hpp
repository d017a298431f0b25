#pragma once

#include <unsupported/Eigen/FFT>
#include <xconv/field.hpp>

namespace xconv {

/// Smallest size >= n whose factors are all 2, 3 or 5 (keeps kissfft fast).
inline int next_fast_size(int n) {
  if (n < 1) return 1;
  for (int s = n;; ++s) {
    int m = s;
    for (int f : {2, 3, 5})
      while (m % f == 0) m /= f;
    if (m == 1) return s;
  }
}

template <class Real>
void fft_rows(CGrid<Real>& a, bool inverse) {
  Eigen::FFT<Real> fft;
  using VC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
  VC in(a.cols()), out(a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    in = a.row(r).matrix().transpose();
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    a.row(r) = out.transpose().array();
  }
}

template <class Real>
void fft_cols(CGrid<Real>& a, bool inverse) {
  Eigen::FFT<Real> fft;
  using VC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
  VC in(a.rows()), out(a.rows());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    in = a.col(c).matrix();
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    a.col(c) = out.array();
  }
}

template <class Real>
void fft2(CGrid<Real>& a, bool inverse = false) {
  fft_cols(a, inverse);
  fft_rows(a, inverse);
}

namespace detail {

/// Embed a centered filter into a PxP-style padded grid, with the filter
/// center wrapped to index (0,0).
template <class Real>
CGrid<Real> wrap_filter(const CGrid<Real>& f, int fcx, int fcy, int ph, int pw) {
  CGrid<Real> out = CGrid<Real>::Zero(ph, pw);
  for (int y = 0; y < f.rows(); ++y)
    for (int x = 0; x < f.cols(); ++x) {
      const int u = ((x - fcx) % pw + pw) % pw;
      const int v = ((y - fcy) % ph + ph) % ph;
      out(v, u) += f(y, x);
    }
  return out;
}

}  // namespace detail

/// Zero-padded linear filtering via the FFT.
///   correlate:  out(p) = sum_u conj(F(u)) H(p+u)
///   convolve:   out(p) = sum_u F(u) H(p-u)
/// with u running over filter offsets relative to the filter center.
/// If periodic, the domain wraps at the signal size instead of padding.
template <class Real>
CGrid<Real> filter2_fft(const CGrid<Real>& signal, const CGrid<Real>& filt,
                        int fcx, int fcy, bool correlate, bool periodic = false) {
  const int h = static_cast<int>(signal.rows());
  const int w = static_cast<int>(signal.cols());
  const int fh = static_cast<int>(filt.rows());
  const int fw = static_cast<int>(filt.cols());
  const int ph = periodic ? h : next_fast_size(h + fh);
  const int pw = periodic ? w : next_fast_size(w + fw);

  CGrid<Real> A = CGrid<Real>::Zero(ph, pw);
  A.topLeftCorner(h, w) = signal;
  CGrid<Real> B = detail::wrap_filter(filt, fcx, fcy, ph, pw);

  fft2(A, false);
  fft2(B, false);
  if (correlate)
    A *= B.conjugate();
  else
    A *= B;
  fft2(A, true);
  return A.topLeftCorner(h, w);
}

/// Trigonometric (zero-padded spectrum) upsampling by an integer factor.
/// Values at original sample positions are preserved; sub-sample values come
/// from the trigonometric interpolant, far more accurate than bilinear for
/// smooth inputs.  Nyquist bins of even sizes are split evenly.
template <class Real>
Field2<Real> fourier_upsample(const Field2<Real>& f, int factor) {
  if (factor < 1) throw std::invalid_argument("upsampling factor must be >= 1");
  const int h = f.height(), w = f.width();
  const int H2 = h * factor, W2 = w * factor;
  CGrid<Real> S = f.values;
  fft2(S, false);
  CGrid<Real> B = CGrid<Real>::Zero(H2, W2);
  for (int fy = -h / 2; fy <= h / 2; ++fy) {
    const Real wy = (h % 2 == 0 && 2 * std::abs(fy) == h) ? Real(0.5) : Real(1);
    const int sy = (fy + h) % h, ty = (fy + H2) % H2;
    for (int fx = -w / 2; fx <= w / 2; ++fx) {
      const Real wx = (w % 2 == 0 && 2 * std::abs(fx) == w) ? Real(0.5) : Real(1);
      const int sx = (fx + w) % w, tx = (fx + W2) % W2;
      B(ty, tx) += wy * wx * S(sy, sx);
    }
  }
  fft2(B, true);
  Field2<Real> out(W2, H2);
  out.values = B * Real(factor) * Real(factor);
  return out;
}

// --- 3D -------------------------------------------------------------------

template <class Real>
void fft3(Field3<Real>& a, bool inverse) {
  Eigen::FFT<Real> fft;
  using V = std::vector<std::complex<Real>>;
  // x lines
  {
    V in(a.nx), out(a.nx);
    for (int z = 0; z < a.nz; ++z)
      for (int y = 0; y < a.ny; ++y) {
        for (int x = 0; x < a.nx; ++x) in[x] = a.at(x, y, z);
        if (inverse)
          fft.inv(out, in);
        else
          fft.fwd(out, in);
        for (int x = 0; x < a.nx; ++x) a.at(x, y, z) = out[x];
      }
  }
  // y lines
  {
    V in(a.ny), out(a.ny);
    for (int z = 0; z < a.nz; ++z)
      for (int x = 0; x < a.nx; ++x) {
        for (int y = 0; y < a.ny; ++y) in[y] = a.at(x, y, z);
        if (inverse)
          fft.inv(out, in);
        else
          fft.fwd(out, in);
        for (int y = 0; y < a.ny; ++y) a.at(x, y, z) = out[y];
      }
  }
  // z lines
  {
    V in(a.nz), out(a.nz);
    for (int y = 0; y < a.ny; ++y)
      for (int x = 0; x < a.nx; ++x) {
        for (int z = 0; z < a.nz; ++z) in[z] = a.at(x, y, z);
        if (inverse)
          fft.inv(out, in);
        else
          fft.fwd(out, in);
        for (int z = 0; z < a.nz; ++z) a.at(x, y, z) = out[z];
      }
  }
}

template <class Real>
Field3<Real> filter3_fft(const Field3<Real>& signal, const Field3<Real>& filt,
                         int fcx, int fcy, int fcz, bool correlate) {
  const int px = next_fast_size(signal.nx + filt.nx);
  const int py = next_fast_size(signal.ny + filt.ny);
  const int pz = next_fast_size(signal.nz + filt.nz);

  Field3<Real> A(px, py, pz), B(px, py, pz);
  for (int z = 0; z < signal.nz; ++z)
    for (int y = 0; y < signal.ny; ++y)
      for (int x = 0; x < signal.nx; ++x) A.at(x, y, z) = signal.at(x, y, z);
  for (int z = 0; z < filt.nz; ++z)
    for (int y = 0; y < filt.ny; ++y)
      for (int x = 0; x < filt.nx; ++x) {
        const int u = ((x - fcx) % px + px) % px;
        const int v = ((y - fcy) % py + py) % py;
        const int s = ((z - fcz) % pz + pz) % pz;
        B.at(u, v, s) += filt.at(x, y, z);
      }

  fft3(A, false);
  fft3(B, false);
  for (size_t i = 0; i < A.values.size(); ++i)
    A.values[i] *= correlate ? std::conj(B.values[i]) : B.values[i];
  fft3(A, true);

  Field3<Real> out(signal.nx, signal.ny, signal.nz);
  for (int z = 0; z < signal.nz; ++z)
    for (int y = 0; y < signal.ny; ++y)
      for (int x = 0; x < signal.nx; ++x) out.at(x, y, z) = A.at(x, y, z);
  return out;
}

}  // namespace xconv
