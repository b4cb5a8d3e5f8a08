#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace lvq {

using Vec = std::vector<double>;

/// Absent feature entries are carried as quiet NaN in memory and as an
/// empty field in CSV.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

/// Feature vectors with integer class labels in 1..num_classes.
struct LabeledDataset {
  std::size_t dim = 0;
  std::vector<Vec> points;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  /// Points of class z, z in 1..num_classes.
  std::vector<std::size_t> indices_of_class(int z) const;
  /// Count per class, index z-1.
  std::vector<std::size_t> class_counts() const;
  /// True when every class 1..num_classes has at least one point.
  bool has_all_classes() const;

  /// Throws std::invalid_argument on inconsistent dimensions or labels.
  void validate() const;

  /// Row subset, keeping dim and num_classes.
  LabeledDataset subset(const std::vector<std::size_t>& rows) const;
};

/// Builds a dataset from rows, inferring dim and num_classes (= max label).
LabeledDataset make_dataset(std::vector<Vec> points, std::vector<int> labels);

/// CSV format: header "f1,...,fM,label"; empty feature cell = missing;
/// label a positive integer.
LabeledDataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const LabeledDataset& data, const std::string& path);

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

}  // namespace lvq
