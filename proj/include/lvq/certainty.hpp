#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lvq/model.hpp"

namespace lvq {

enum class CertaintyMeasure { relsim, conf, bayes_oracle };

const char* measure_name(CertaintyMeasure m);

/// Relative similarity (d- - d+)/(d- + d+) where d+ is the distance to the
/// winning prototype and d- the distance to the closest prototype of another
/// class, both under the model's own metric. Returns 0 when d+ + d- = 0.
double relsim(const PrototypeModel& model, std::span<const double> x);

/// Max class posterior of an RSLVQ model.
double conf(const PrototypeModel& model, std::span<const double> x);

struct MixtureComponent {
  Vec mean;
  Vec stddev;  // per-dimension, > 0
  double prior = 0.0;
  int label = 0;
};

struct UniformNoise {
  double mass = 0.0;
  Vec lo;
  Vec hi;
};

/// Ground-truth sampling law of a synthetic dataset: diagonal Gaussian
/// components plus an optional uniform box overlay.
struct GenerativeMixture {
  std::size_t dim = 0;
  int num_classes = 0;
  std::vector<MixtureComponent> components;
  std::optional<UniformNoise> noise;

  void validate() const;
};

/// P(z | x) per class; the noise component's mass is split evenly across
/// classes. Falls back to the uniform vector when the density is zero.
std::vector<double> mixture_class_posterior(const GenerativeMixture& mix,
                                            std::span<const double> x);

/// Chow's certainty max_z P(z | x) under the true mixture.
double bayes_certainty(const GenerativeMixture& mix, std::span<const double> x);

/// argmax_z P(z | x); ties break to the smallest class id.
int bayes_classify(const GenerativeMixture& mix, std::span<const double> x);

GenerativeMixture load_mixture(const std::string& path);
void save_mixture(const GenerativeMixture& mix, const std::string& path);

/// One score per point. `model` may be null for the Bayes oracle, `mix` may
/// be null for the model-based measures.
std::vector<double> certainty_scores(CertaintyMeasure measure,
                                     const PrototypeModel* model,
                                     const GenerativeMixture* mix,
                                     const LabeledDataset& data);

}  // namespace lvq
