#include "lvq/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lvq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (points_per_cluster < 1)
    throw std::invalid_argument("synthetic spec: points_per_cluster must be >= 1");
  if (noise_fraction < 0.0 || noise_fraction >= 1.0)
    throw std::invalid_argument("synthetic spec: noise fraction must be in [0, 1)");
}

SyntheticData gen_gaussian_clusters(const SyntheticSpec& spec) {
  spec.validate();
  const Vec mean_x = {-4.0, 4.5};
  const Vec mean_y = {4.0, 0.5};
  const Vec std_x = {5.2, 7.1};
  const Vec std_y = {2.5, 2.1};

  std::mt19937_64 rng(splitmix64(spec.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(spec.points_per_cluster);

  std::vector<Vec> points;
  std::vector<int> labels;
  points.reserve(2 * n);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back({mean_x[c] + gauss(rng) * std_x[c], mean_y[c] + gauss(rng) * std_y[c]});
      labels.push_back(c + 1);
    }
  }

  // Bounding box of the Gaussian samples, inflated by 20% about its center.
  Vec lo = {points[0][0], points[0][1]};
  Vec hi = lo;
  for (const auto& p : points)
    for (std::size_t d = 0; d < 2; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  for (std::size_t d = 0; d < 2; ++d) {
    const double center = 0.5 * (lo[d] + hi[d]);
    const double half = 0.5 * (hi[d] - lo[d]) * 1.2;
    lo[d] = center - half;
    hi[d] = center + half;
  }

  const auto noise_count = static_cast<std::size_t>(
      std::llround(spec.noise_fraction * static_cast<double>(2 * n)));
  if (noise_count > 0) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> ux(lo[0], hi[0]), uy(lo[1], hi[1]);
    for (std::size_t k = 0; k < noise_count; ++k) {
      const std::size_t i = order[k];
      points[i] = {ux(rng), uy(rng)};
      // Noise points are labeled by the nearest cluster mean.
      const double d1 = (points[i][0] - mean_x[0]) * (points[i][0] - mean_x[0]) +
                        (points[i][1] - mean_y[0]) * (points[i][1] - mean_y[0]);
      const double d2 = (points[i][0] - mean_x[1]) * (points[i][0] - mean_x[1]) +
                        (points[i][1] - mean_y[1]) * (points[i][1] - mean_y[1]);
      labels[i] = d1 <= d2 ? 1 : 2;
    }
  }

  SyntheticData out;
  out.data = make_dataset(std::move(points), std::move(labels));
  out.mixture.dim = 2;
  out.mixture.num_classes = 2;
  const double f = static_cast<double>(noise_count) / static_cast<double>(2 * n);
  for (int c = 0; c < 2; ++c) {
    MixtureComponent comp;
    comp.mean = {mean_x[c], mean_y[c]};
    comp.stddev = {std_x[c], std_y[c]};
    comp.prior = (1.0 - f) / 2.0;
    comp.label = c + 1;
    out.mixture.components.push_back(std::move(comp));
  }
  if (noise_count > 0) out.mixture.noise = UniformNoise{f, lo, hi};
  out.mixture.validate();
  return out;
}

SyntheticData gen_pearl_necklace(const SyntheticSpec& spec) {
  spec.validate();
  const Vec mean_x = {2.0, 44.0, 85.0, 100.0, 136.0};
  const Vec sigma = {1.0, 20.0, 0.5, 7.0, 11.0};  // same per dimension
  const double mean_y = 3.0;

  std::mt19937_64 rng(splitmix64(spec.seed ^ 0x9EA1ULL));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t n = static_cast<std::size_t>(spec.points_per_cluster);

  std::vector<Vec> points;
  std::vector<int> labels;
  points.reserve(5 * n);
  SyntheticData out;
  out.mixture.dim = 2;
  out.mixture.num_classes = 5;
  for (int c = 0; c < 5; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back({mean_x[c] + gauss(rng) * sigma[c], mean_y + gauss(rng) * sigma[c]});
      labels.push_back(c + 1);
    }
    MixtureComponent comp;
    comp.mean = {mean_x[c], mean_y};
    comp.stddev = {sigma[c], sigma[c]};
    comp.prior = 0.2;
    comp.label = c + 1;
    out.mixture.components.push_back(std::move(comp));
  }
  out.data = make_dataset(std::move(points), std::move(labels));
  out.mixture.validate();
  return out;
}

SyntheticData generate(const SyntheticSpec& spec) {
  return spec.kind == SyntheticKind::gaussian_clusters ? gen_gaussian_clusters(spec)
                                                       : gen_pearl_necklace(spec);
}

}  // namespace lvq
