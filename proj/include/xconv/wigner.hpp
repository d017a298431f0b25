#pragma once

#include <array>
#include <xconv/field.hpp>

namespace xconv {

namespace detail {

inline double log_factorial(int n) {
  static std::vector<double> table{0.0};
  while (static_cast<int>(table.size()) <= n)
    table.push_back(table.back() + std::log(double(table.size())));
  return table[n];
}

/// Wigner little-d matrix element d^l_{m1,m2}(beta), z-y-z convention.
template <class Real>
Real wigner_small_d(int l, int m1, int m2, Real beta) {
  const Real cb = std::cos(beta / 2), sb = std::sin(beta / 2);
  const int s_lo = std::max(0, m2 - m1);
  const int s_hi = std::min(l - m1, l + m2);
  const double pref = 0.5 * (log_factorial(l + m1) + log_factorial(l - m1) +
                             log_factorial(l + m2) + log_factorial(l - m2));
  Real sum = 0;
  for (int s = s_lo; s <= s_hi; ++s) {
    const double lg = pref - log_factorial(l + m2 - s) - log_factorial(s) -
                      log_factorial(m1 - m2 + s) - log_factorial(l - m1 - s);
    const int pc = 2 * l + m2 - m1 - 2 * s;  // cos power
    const int ps = m1 - m2 + 2 * s;          // sin power
    Real term = Real(std::exp(lg)) * std::pow(cb, pc) * std::pow(sb, ps);
    if ((m1 - m2 + s) % 2) term = -term;
    sum += term;
  }
  return sum;
}

/// z-y-z Euler angles (alpha, beta, gamma) with R = Rz(alpha)Ry(beta)Rz(gamma).
template <class Real>
std::array<Real, 3> euler_zyz(const Eigen::Quaternion<Real>& q) {
  const Eigen::Matrix<Real, 3, 3> M = q.toRotationMatrix();
  const Real sb = std::sqrt(M(0, 2) * M(0, 2) + M(1, 2) * M(1, 2));
  const Real beta = std::atan2(sb, M(2, 2));
  Real alpha, gamma;
  if (sb > Real(1e-12)) {
    alpha = std::atan2(M(1, 2), M(0, 2));
    gamma = std::atan2(M(2, 1), -M(2, 0));
  } else {
    // rotation about z only (or by pi about an axis in the xy-plane)
    alpha = std::atan2(M(1, 0), M(0, 0));
    if (M(2, 2) < 0) alpha = -alpha;
    gamma = 0;
  }
  return {alpha, beta, gamma};
}

}  // namespace detail

/// Unitary (2l+1)x(2l+1) matrix expressing how a rotation mixes the degree-l
/// spherical harmonics.  With (R f)(x) = f(R^{-1} x),
///   rotate(Y_l^m) = sum_{m'} d(m', m) Y_l^{m'},
/// so columns index the source order m and rows the target order m'.
/// Satisfies block(R1*R2) = block(R1)*block(R2).
template <class Real>
struct WignerBlock {
  int l = 0;
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> D;

  const Cx<Real>& d(int m_to, int m_from) const { return D(m_to + l, m_from + l); }
};

template <class Real>
WignerBlock<Real> wigner_d(int l, const Eigen::Quaternion<Real>& R) {
  if (l < 0) throw std::invalid_argument("degree must be >= 0");
  if (std::abs(R.norm() - Real(1)) > Real(1e-9))
    throw std::invalid_argument("rotation quaternion must be unit norm");
  const auto [alpha, beta, gamma] = detail::euler_zyz(R.normalized());
  WignerBlock<Real> w;
  w.l = l;
  w.D.resize(2 * l + 1, 2 * l + 1);
  for (int m1 = -l; m1 <= l; ++m1)
    for (int m2 = -l; m2 <= l; ++m2)
      w.D(m1 + l, m2 + l) = std::polar(Real(1), -m1 * alpha) *
                            detail::wigner_small_d<Real>(l, m1, m2, beta) *
                            std::polar(Real(1), -m2 * gamma);
  return w;
}

/// Single matrix element d^l(m_to, m_from) without building the whole block.
template <class Real>
Cx<Real> wigner_d_entry(int l, int m_to, int m_from, Real alpha, Real beta, Real gamma) {
  return std::polar(Real(1), -m_to * alpha) *
         detail::wigner_small_d<Real>(l, m_to, m_from, beta) *
         std::polar(Real(1), -m_from * gamma);
}

}  // namespace xconv
