#pragma once

#include <cstdint>

#include "lvq/certainty.hpp"
#include "lvq/dataset.hpp"

namespace lvq {

enum class SyntheticKind { gaussian_clusters, pearl_necklace };

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::gaussian_clusters;
  int points_per_cluster = 500;
  double noise_fraction = 0.05;  // gaussian_clusters only, in [0, 1)
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticData {
  LabeledDataset data;
  GenerativeMixture mixture;  // the exact sampling law, for the Bayes oracle
};

/// Two overlapping 2-D Gaussian clusters, means (-4, 4) and (4.5, 0.5),
/// per-dimension stds (5.2, 2.5) and (7.1, 2.1). A noise_fraction of the
/// points is redrawn uniformly from the samples' bounding box inflated by
/// 20% and labeled by the nearest cluster mean.
SyntheticData gen_gaussian_clusters(const SyntheticSpec& spec);

/// Five 2-D Gaussian clusters on a line: means (2|44|85|100|136, 3), equal
/// x/y stds (1, 20, 0.5, 7, 11). Neighbouring clusters overlap at very
/// different spatial scales.
SyntheticData gen_pearl_necklace(const SyntheticSpec& spec);

SyntheticData generate(const SyntheticSpec& spec);

}  // namespace lvq
