#pragma once

#include <random>
#include <xconv/engine.hpp>

namespace xconv {

/// Seeded uniform white noise in [0,1); bit-identical for a given seed.
template <class Real>
Field2<Real> white_noise(int width, int height, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Field2<Real> f(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      f.at(x, y) = Real(rng() >> 11) * Real(0x1p-53);
  return f;
}

/// Long, narrow anisotropic Gaussian oriented along +x, support 2.5*length.
template <class Real>
Field2<Real> anisotropic_gaussian(Real length, Real width) {
  const int R = static_cast<int>(std::ceil(Real(2.5) * length));
  Field2<Real> f(2 * R + 1, 2 * R + 1);
  for (int y = -R; y <= R; ++y)
    for (int x = -R; x <= R; ++x) {
      if (Real(x * x + y * y) > Real(R) * Real(R)) continue;
      f.at(x + R, y + R) = std::exp(-Real(x) * x / (2 * length * length) -
                                    Real(y) * y / (2 * width * width));
    }
  return f;
}

/// Line integral convolution: extended convolution of seeded noise with a
/// rotating anisotropic Gaussian.  The normalized form divides by the
/// all-ones response; the unnormalized form skips the division.
template <class Real>
Field2<Real> lic(const XformField<Real>& field, Real length, Real width,
                 uint64_t seed, bool normalized = true, int K = 16) {
  if (field.kind != XformKind::rotation2)
    throw std::invalid_argument("lic needs a rotation2 field");
  if (!(length > width) || !(width > Real(0)))
    throw std::invalid_argument("need length > width > 0");
  Field2<Real> noise = white_noise<Real>(field.width(), field.height(), seed);
  Field2<Real> kern = anisotropic_gaussian(length, width);
  const int R = (kern.width() - 1) / 2;
  const int n_angles = std::max(64, 4 * K);
  FreqFilter2<Real> F = decompose_rotation2(kern, Real(R), Real(R), K,
                                            std::max(8, R), n_angles,
                                            Real(R) + Real(0.5));
  if (normalized) return smooth_adaptive(noise, field, F).output;
  auto resp = xconv_fast(noise, field, F);
  Field2<Real> out(field.width(), field.height());
  out.values = resp.output.values.real().template cast<Cx<Real>>();
  return out;
}

}  // namespace xconv
