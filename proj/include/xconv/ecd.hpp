#pragma once

#include <xconv/vote_filter.hpp>

namespace xconv {

/// Rotation-invariant local descriptor: the L2-normalized flattening of the
/// optimal filter built at a keypoint.
template <class Real>
struct ECDescriptor {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> values;  // length (2R+1)^2, unit L2
  Real x = 0, y = 0;
  Real eps = 0;
  bool degenerate = false;  // zero-gradient neighborhood, values all zero

  int length() const { return static_cast<int>(values.size()); }

  Real distance(const ECDescriptor& o) const { return (values - o.values).norm(); }
};

using ECDescriptord = ECDescriptor<double>;

template <class Real>
ECDescriptor<Real> ecd(const Field2<Real>& image, Real kx, Real ky, Real eps) {
  if (kx < 1 || ky < 1 || kx > image.width() - 2 || ky > image.height() - 2)
    throw std::invalid_argument("keypoint must be at least 1 px inside the image");
  ECDescriptor<Real> d;
  d.x = kx;
  d.y = ky;
  d.eps = eps;
  const int R = static_cast<int>(std::ceil(eps));
  try {
    VoteFilter<Real> f = build_optimal_filter(image, kx, ky, eps);
    d.values.resize(f.side() * f.side());
    for (int y = 0; y < f.side(); ++y)
      for (int x = 0; x < f.side(); ++x) d.values(y * f.side() + x) = f.weights(y, x);
    const Real n = d.values.norm();
    if (n > Real(0))
      d.values /= n;
    else
      d.degenerate = true;
  } catch (const std::invalid_argument&) {
    d.values = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero((2 * R + 1) * (2 * R + 1));
    d.degenerate = true;
  }
  return d;
}

/// Mean precision/recall at each rank, plus per-keypoint bookkeeping.
template <class Real>
struct MatchCurves {
  std::vector<Real> precision;  // index r-1 holds P(r)
  std::vector<Real> recall;
  int evaluated = 0;
  int skipped = 0;  // scene keypoints with no valid match under the ground truth
};

/// Rank model descriptors by ascending distance (ties by model index) and
/// average precision/recall over scene keypoints.  truth[s] is the set of
/// model indices that are valid matches for scene keypoint s.
template <class Real>
MatchCurves<Real> match_descriptors(const std::vector<ECDescriptor<Real>>& scene,
                                    const std::vector<ECDescriptor<Real>>& models,
                                    const std::vector<std::vector<int>>& truth,
                                    int r_max = 0) {
  if (truth.size() != scene.size())
    throw std::invalid_argument("ground truth size must match scene keypoints");
  const int M = static_cast<int>(models.size());
  if (r_max <= 0 || r_max > M) r_max = M;
  MatchCurves<Real> out;
  out.precision.assign(r_max, Real(0));
  out.recall.assign(r_max, Real(0));
  for (size_t s = 0; s < scene.size(); ++s) {
    if (truth[s].empty()) {
      ++out.skipped;
      continue;
    }
    std::vector<int> order(M);
    for (int i = 0; i < M; ++i) order[i] = i;
    std::vector<Real> dist(M);
    for (int i = 0; i < M; ++i) dist[i] = scene[s].distance(models[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[a] < dist[b]; });
    std::vector<char> valid(M, 0);
    for (int m : truth[s]) valid[m] = 1;
    int hits = 0;
    for (int r = 0; r < r_max; ++r) {
      if (valid[order[r]]) ++hits;
      out.precision[r] += Real(hits) / Real(r + 1);
      out.recall[r] += Real(hits) / Real(truth[s].size());
    }
    ++out.evaluated;
  }
  if (out.evaluated > 0)
    for (int r = 0; r < r_max; ++r) {
      out.precision[r] /= out.evaluated;
      out.recall[r] /= out.evaluated;
    }
  return out;
}

}  // namespace xconv
