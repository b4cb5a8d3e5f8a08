#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lvq/model.hpp"

namespace lvq {

enum class Phi { identity, logistic };

struct TrainConfig {
  int prototypes_per_class = 1;
  int epochs = 100;
  double lr_prototypes = 0.05;
  double lr_metric = 0.05;
  double lr_decay = 0.01;  // rate(epoch) = lr / (1 + lr_decay * epoch)
  Phi phi = Phi::identity;
  double sigma = 1.0;  // RSLVQ bandwidth
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrainReport {
  std::vector<double> cost_trace;  // one value per epoch
  double final_train_accuracy = 0.0;
};

struct TrainResult {
  PrototypeModel model;
  TrainReport report;
};

/// Margin cost sum_i Phi((d+ - d-)/(d+ + d-)) under the model's metric.
double glvq_cost(const PrototypeModel& model, const LabeledDataset& data,
                 Phi phi = Phi::identity);

/// log L = sum_i log(p(x_i, y_i | W) / p(x_i | W)), computed in log-space.
double rslvq_log_likelihood_ratio(const PrototypeModel& model,
                                  const LabeledDataset& data);

TrainResult train_glvq(const LabeledDataset& data, const TrainConfig& config);
TrainResult train_gmlvq(const LabeledDataset& data, const TrainConfig& config);
TrainResult train_lgmlvq(const LabeledDataset& data, const TrainConfig& config);
TrainResult train_rslvq(const LabeledDataset& data, const TrainConfig& config);

/// Class posteriors P(z | x) of an RSLVQ model, nonnegative and summing to 1.
std::vector<double> posterior(const PrototypeModel& model, std::span<const double> x);

/// Batch gradients of the two cost functions, exposed so they can be checked
/// against finite differences.
struct GlvqGradient {
  std::vector<Vec> prototypes;
  std::vector<Matrix> omegas;  // empty for Euclidean models
};

GlvqGradient glvq_cost_gradient(const PrototypeModel& model, const LabeledDataset& data,
                                Phi phi = Phi::identity);
std::vector<Vec> rslvq_loglik_gradient(const PrototypeModel& model,
                                       const LabeledDataset& data);

}  // namespace lvq
