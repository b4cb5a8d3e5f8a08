#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lvq/dataset.hpp"

namespace lvq {

/// Small dense row-major matrix, used for the metric factors.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double trace() const;
  double frobenius_norm() const;
  void scale(double s);
};

/// Lambda = Omega^T * Omega; positive semi-definite by construction.
Matrix gram_product(const Matrix& omega);

enum class MetricKind { euclidean, global_matrix, local_matrices };

const char* metric_kind_name(MetricKind k);

struct RslvqParams {
  std::vector<double> sigma;   // per-prototype bandwidth, > 0
  std::vector<double> priors;  // nonnegative, sums to 1
};

/// Prototype vectors with class labels and a metric specification. The
/// matrix metrics are stored in factored form (Lambda = Omega^T Omega).
struct PrototypeModel {
  std::size_t dim = 0;
  std::vector<Vec> prototypes;
  std::vector<int> proto_labels;
  MetricKind metric = MetricKind::euclidean;
  std::vector<Matrix> omegas;  // one for global_matrix, one per prototype for local
  std::optional<RslvqParams> rslvq;

  std::size_t num_prototypes() const { return prototypes.size(); }
  int num_classes() const;

  /// The PSD matrix that weights distances for prototype j
  /// (identity for the Euclidean metric).
  Matrix lambda(std::size_t j) const;

  void validate() const;
};

struct ClassificationOutcome {
  int predicted = 0;
  std::size_t cell = 0;  // index of the winning prototype
  bool correct = false;  // meaningful when a true label was supplied
};

/// Squared quadratic-form distance (x - w_j)^T Lambda (x - w_j); dimensions
/// where x is missing are excluded from the sum.
double distance(const PrototypeModel& model, std::size_t j, std::span<const double> x);

/// Winner-takes-all classification; ties break to the smallest prototype index.
ClassificationOutcome classify(const PrototypeModel& model, std::span<const double> x);
ClassificationOutcome classify(const PrototypeModel& model, std::span<const double> x,
                               int true_label);

/// Winning prototype index per point.
std::vector<std::size_t> voronoi_partition(const PrototypeModel& model,
                                           const LabeledDataset& data);

/// Plain-text model file; see README for the exact field order. Values are
/// written with 17 significant digits so a load/save cycle is bit-stable.
PrototypeModel load_model(const std::string& path);
void save_model(const PrototypeModel& model, const std::string& path);

}  // namespace lvq
