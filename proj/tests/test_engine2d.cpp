#include <doctest.h>

#include "helpers.hpp"

using namespace xconv;

namespace {

// independent gather reference: full-image scan over a shared lookup table
Field2d reference_gather(const Field2d& H, const RGrid<double>& angle,
                         const Field2d& filt, double fcx, double fcy, double eps,
                         int nr, int na) {
  auto table = detail::brute_table(filt, fcx, fcy, eps, nr, na);
  Field2d out(H.width(), H.height());
  for (int py = 0; py < H.height(); ++py)
    for (int px = 0; px < H.width(); ++px) {
      const double a = angle(py, px);
      Cx<double> acc(0);
      for (int qy = 0; qy < H.height(); ++qy)
        for (int qx = 0; qx < H.width(); ++qx) {
          const double dx = qx - px, dy = qy - py;
          if (dx * dx + dy * dy > eps * eps) continue;
          acc += H.values(qy, qx) *
                 std::conj(polar_sample(table, std::hypot(dx, dy),
                                        std::atan2(dy, dx) - a));
        }
      out.values(py, px) = acc;
    }
  return out;
}

// oracle sharing the fast path's radial interpolation and exact phases
Field2d spectral_oracle(const Field2d& H, const XformFieldd& T,
                        const FreqFilter2d& F, XMode mode) {
  const int R = static_cast<int>(std::ceil(F.r_max));
  Field2d out(H.width(), H.height());
  for (int py = 0; py < H.height(); ++py)
    for (int px = 0; px < H.width(); ++px)
      for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
          const double r = std::hypot(double(dx), double(dy));
          if (r > F.r_max) continue;
          const double th = std::atan2(double(dy), double(dx));
          if (mode == XMode::correlation) {
            const int qx = px + dx, qy = py + dy;
            if (qx < 0 || qy < 0 || qx >= H.width() || qy >= H.height()) continue;
            Cx<double> fv(0);
            for (int ci = 0; ci < F.n_components(); ++ci)
              fv += component_value(F, ci, r, th - T.angle(py, px));
            out.values(py, px) += H.values(qy, qx) * std::conj(fv);
          } else {
            const int qx = px - dx, qy = py - dy;
            if (qx < 0 || qy < 0 || qx >= H.width() || qy >= H.height()) continue;
            Cx<double> fv(0);
            for (int ci = 0; ci < F.n_components(); ++ci)
              fv += component_value(F, ci, r, th - T.angle(qy, qx));
            out.values(py, px) += H.values(qy, qx) * fv;
          }
        }
  return out;
}

// full-band rotation decomposition of a (2R+1)^2 filter centered at R
FreqFilter2d full_decomp(const Field2d& filt, int R, int n_radii = 24,
                         int n_angles = 64) {
  return decompose_rotation2(filt, double(R), double(R), n_angles, n_radii,
                             n_angles, double(R));
}

}  // namespace

TEST_CASE("brute gather matches an independent reference loop") {
  std::mt19937_64 rng(51);
  Field2d H = xt::random_field(8, 8, rng, true);
  Field2d filt = xt::random_field(5, 5, rng, true);
  XformFieldd T = xt::random_rotation_field(8, 8, rng);
  auto r = xcorr_brute(H, T, filt, 2.0, 2.0, 2.5, 48, 128);
  Field2d ref = reference_gather(H, T.angle, filt, 2.0, 2.0, 2.5, 48, 128);
  CHECK(xt::rel_l2(r.output, ref) < 1e-12);
}

TEST_CASE("zero rotation field reduces the brute gather to plain correlation") {
  std::mt19937_64 rng(52);
  const int R = 4;
  Field2d H = xt::random_field(12, 12, rng, true);
  Field2d filt = xt::random_smooth_filter(R, rng);
  XformFieldd T = xt::constant_rotation_field(12, 12, 0.0);
  auto r = xcorr_brute(H, T, filt, double(R), double(R), double(R));
  Field2d ref(12, 12);
  for (int py = 0; py < 12; ++py)
    for (int px = 0; px < 12; ++px) {
      Cx<double> acc(0);
      for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
          const int qx = px + dx, qy = py + dy;
          if (qx < 0 || qy < 0 || qx >= 12 || qy >= 12) continue;
          if (dx * dx + dy * dy > R * R) continue;
          acc += H.values(qy, qx) * std::conj(filt.at(dx + R, dy + R));
        }
      ref.values(py, px) = acc;
    }
  // only the lookup-table representation of the image separates the two
  CHECK(xt::rel_l2(r.output, ref) < 1e-2);
}

TEST_CASE("brute operators are linear in the signal") {
  std::mt19937_64 rng(53);
  Field2d A = xt::random_field(9, 9, rng, true);
  Field2d B = xt::random_field(9, 9, rng, true);
  Field2d filt = xt::random_field(5, 5, rng, true);
  XformFieldd T = xt::random_rotation_field(9, 9, rng);
  const Cx<double> ca(0.3, 1.1), cb(-0.8, 0.4);
  Field2d mix(9, 9);
  mix.values = ca * A.values + cb * B.values;
  auto ra = xconv_brute(A, T, filt, 2.0, 2.0, 2.5);
  auto rb = xconv_brute(B, T, filt, 2.0, 2.0, 2.5);
  auto rm = xconv_brute(mix, T, filt, 2.0, 2.0, 2.5);
  CHECK((rm.output.values - ca * ra.output.values - cb * rb.output.values)
            .abs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("fast paths match the bilinear-warp brute oracle") {
  std::mt19937_64 rng(54);
  const int n = 24, R = 6;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R);
  for (int trial = 0; trial < 3; ++trial) {
    Field2d H = xt::random_field(n, n, rng, false);
    XformFieldd T = xt::random_rotation_field(n, n, rng);
    auto fast_c = xcorr_fast(H, T, F);
    auto brute_c = xcorr_brute(H, T, F);
    CHECK(xt::rel_l2(fast_c.output, brute_c.output) < 3e-3);
    auto fast_v = xconv_fast(H, T, F);
    auto brute_v = xconv_brute(H, T, F);
    CHECK(xt::rel_l2(fast_v.output, brute_v.output) < 3e-3);
  }
}

TEST_CASE("fast paths match the spectral oracle to FFT precision") {
  std::mt19937_64 rng(55);
  const int n = 24, R = 6;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R);
  Field2d H = xt::random_field(n, n, rng, false);
  XformFieldd T = xt::random_rotation_field(n, n, rng);
  auto fast_c = xcorr_fast(H, T, F);
  CHECK(xt::rel_l2(fast_c.output, spectral_oracle(H, T, F, XMode::correlation)) <
        1e-8);
  auto fast_v = xconv_fast(H, T, F);
  CHECK(xt::rel_l2(fast_v.output, spectral_oracle(H, T, F, XMode::convolution)) <
        1e-8);
}

TEST_CASE("constant rotation field reduces to filtering with the rotated filter") {
  std::mt19937_64 rng(56);
  const int n = 20, R = 5;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R, 20, 64);
  const double th0 = 0.9;
  // rotating the filter by th0 multiplies component k by e^{-i k th0}
  FreqFilter2d Frot = F;
  for (int ci = 0; ci < F.n_components(); ++ci)
    Frot.comps.col(ci) *= std::polar(1.0, -F.ks[ci] * th0);
  Field2d rot = reconstruct(Frot, 2 * R + 1, 2 * R + 1, double(R), double(R));
  Field2d H = xt::random_field(n, n, rng, true);
  XformFieldd T = xt::constant_rotation_field(n, n, th0);
  auto fast_c = xcorr_fast(H, T, F);
  CGrid<double> ref_c = filter2_fft(H.values, rot.values, R, R, true);
  CHECK(xt::rel_l2(fast_c.output.values, ref_c) < 1e-10);
  auto fast_v = xconv_fast(H, T, F);
  CGrid<double> ref_v = filter2_fft(H.values, rot.values, R, R, false);
  CHECK(xt::rel_l2(fast_v.output.values, ref_v) < 1e-10);
}

TEST_CASE("a single-component plan is one phase-modulated standard correlation") {
  std::mt19937_64 rng(57);
  const int n = 16, R = 5;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R, 16, 32);
  Field2d H = xt::random_field(n, n, rng, true);
  XformFieldd T = xt::random_rotation_field(n, n, rng);
  XConvPlan plan;
  plan.components = {2};
  auto r = xcorr_fast(H, T, F, plan);
  CHECK(r.standard_ops == 1);
  Field2d F2 = render_component(F, F.index_of(2), 2 * R + 1, 2 * R + 1, double(R),
                                double(R));
  CGrid<double> G = filter2_fft(H.values, F2.values, R, R, true);
  CGrid<double> ref =
      G * (2.0 * T.angle)
              .unaryExpr([](double a) { return Cx<double>(std::cos(a), std::sin(a)); });
  CHECK(xt::rel_l2(r.output.values, ref) < 1e-12);
}

TEST_CASE("periodic mode is translation equivariant") {
  std::mt19937_64 rng(58);
  const int n = 16, R = 4;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R, 12, 32);
  Field2d H = xt::random_field(n, n, rng, true);
  XformFieldd T = xt::random_rotation_field(n, n, rng);
  XConvPlan plan;
  plan.periodic = true;
  auto base = xcorr_fast(H, T, F, plan);
  const int sx = 5, sy = 3;
  Field2d Hs(n, n);
  RGrid<double> As(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      Hs.values((y + sy) % n, (x + sx) % n) = H.values(y, x);
      As((y + sy) % n, (x + sx) % n) = T.angle(y, x);
    }
  auto shifted = xcorr_fast(Hs, XformFieldd::rotation(As), F, plan);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      CHECK(std::abs(shifted.output.values((y + sy) % n, (x + sx) % n) -
                     base.output.values(y, x)) < 1e-10);
}

TEST_CASE("standard-convolution count equals the retained component count") {
  std::mt19937_64 rng(59);
  const int n = 12, R = 4;
  Field2d filt = xt::random_smooth_filter(R, rng);
  Field2d H = xt::random_field(n, n, rng, true);
  XformFieldd T = xt::random_rotation_field(n, n, rng);
  for (int K : {0, 2, 4, 8}) {
    FreqFilter2d F =
        decompose_rotation2(filt, double(R), double(R), K, 12, 32, double(R));
    auto rc = xcorr_fast(H, T, F);
    auto rv = xconv_fast(H, T, F);
    CHECK(rc.standard_ops == 2 * (K / 2) + 1);
    CHECK(rv.standard_ops == 2 * (K / 2) + 1);
  }
}

TEST_CASE("real signal and real filter give a real response") {
  std::mt19937_64 rng(60);
  const int n = 18, R = 5;
  Field2d filt = xt::random_smooth_filter(R, rng);  // real-valued
  FreqFilter2d F = full_decomp(filt, R, 16, 32);
  Field2d H = xt::random_field(n, n, rng, false);
  XformFieldd T = xt::random_rotation_field(n, n, rng);
  for (const auto& r : {xcorr_fast(H, T, F), xconv_fast(H, T, F)}) {
    const double scale = r.output.max_abs();
    CHECK(r.output.values.imag().abs().maxCoeff() < 1e-9 * scale);
  }
}

TEST_CASE("keeping the highest-energy components is the best truncation") {
  std::mt19937_64 rng(61);
  const int R = 5;
  Field2d filt = xt::random_smooth_filter(R, rng);
  // 7 components, Nyquist-free sampling
  FreqFilter2d F = decompose_rotation2(filt, double(R), double(R), 6, 16, 64,
                                       double(R));
  REQUIRE(F.n_components() == 7);
  auto full = synthesize_polar(F);
  // error of a truncated synthesis against the full one, on the polar grid
  auto subset_error = [&](unsigned mask) {
    std::vector<int> keep;
    for (int ci = 0; ci < 7; ++ci)
      if (mask & (1u << ci)) keep.push_back(F.ks[ci]);
    auto part = synthesize_polar(F, keep);
    return (part.values - full.values).abs2().sum();
  };
  std::vector<double> energy(7);
  for (int ci = 0; ci < 7; ++ci) energy[ci] = F.comps.col(ci).abs2().sum();
  for (int m = 1; m <= 6; ++m) {
    // greedy pick of the m largest-energy components
    std::vector<int> order(7);
    for (int i = 0; i < 7; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return energy[a] > energy[b]; });
    unsigned best_mask = 0;
    for (int i = 0; i < m; ++i) best_mask |= 1u << order[i];
    const double best = subset_error(best_mask);
    for (unsigned mask = 0; mask < (1u << 7); ++mask) {
      if (__builtin_popcount(mask) != m) continue;
      CHECK(best <= subset_error(mask) + 1e-12);
    }
  }
}

TEST_CASE("input validation") {
  std::mt19937_64 rng(62);
  const int R = 4;
  Field2d filt = xt::random_smooth_filter(R, rng);
  FreqFilter2d F = full_decomp(filt, R, 8, 16);
  Field2d H = xt::random_field(10, 10, rng, true);
  XformFieldd small = xt::random_rotation_field(8, 8, rng);
  CHECK_THROWS_AS(xcorr_fast(H, small, F), std::invalid_argument);
  XformFieldd scale = xt::constant_scale_field(10, 10, 1.0);
  CHECK_THROWS_AS(xcorr_fast(H, scale, F), std::invalid_argument);
  XformFieldd T = xt::random_rotation_field(10, 10, rng);
  XConvPlan plan;
  plan.components = {99};
  CHECK_THROWS_AS(xcorr_fast(H, T, F, plan), std::invalid_argument);
}
