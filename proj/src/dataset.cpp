#include "lvq/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lvq {

std::vector<std::size_t> LabeledDataset::indices_of_class(int z) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == z) out.push_back(i);
  return out;
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) counts[static_cast<std::size_t>(y - 1)]++;
  return counts;
}

bool LabeledDataset::has_all_classes() const {
  auto counts = class_counts();
  return std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
}

void LabeledDataset::validate() const {
  if (points.size() != labels.size())
    throw std::invalid_argument("dataset: points/labels size mismatch");
  for (const auto& p : points)
    if (p.size() != dim) throw std::invalid_argument("dataset: inconsistent dimension");
  if (num_classes < 1 && !points.empty())
    throw std::invalid_argument("dataset: no classes");
  for (int y : labels)
    if (y < 1 || y > num_classes)
      throw std::invalid_argument("dataset: label out of range 1..Z");
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& rows) const {
  LabeledDataset out;
  out.dim = dim;
  out.num_classes = num_classes;
  out.points.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    out.points.push_back(points.at(r));
    out.labels.push_back(labels.at(r));
  }
  return out;
}

LabeledDataset make_dataset(std::vector<Vec> points, std::vector<int> labels) {
  LabeledDataset data;
  data.points = std::move(points);
  data.labels = std::move(labels);
  data.dim = data.points.empty() ? 0 : data.points.front().size();
  data.num_classes = data.labels.empty()
                         ? 0
                         : *std::max_element(data.labels.begin(), data.labels.end());
  data.validate();
  return data;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);
  auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label")
    throw std::runtime_error("dataset header must be f1,...,fM,label: " + path);
  const std::size_t dim = header.size() - 1;

  std::vector<Vec> points;
  std::vector<int> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != dim + 1)
      throw std::runtime_error("dataset row " + std::to_string(lineno) +
                               ": expected " + std::to_string(dim + 1) + " fields");
    Vec x(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (fields[d].empty()) {
        x[d] = missing_value();
      } else {
        try {
          std::size_t pos = 0;
          x[d] = std::stod(fields[d], &pos);
          if (pos != fields[d].size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
          throw std::runtime_error("dataset row " + std::to_string(lineno) +
                                   ": bad feature value '" + fields[d] + "'");
        }
      }
    }
    int y = 0;
    try {
      y = std::stoi(fields[dim]);
    } catch (const std::exception&) {
      throw std::runtime_error("dataset row " + std::to_string(lineno) + ": bad label '" +
                               fields[dim] + "'");
    }
    if (y < 1)
      throw std::runtime_error("dataset row " + std::to_string(lineno) +
                               ": labels must be positive");
    points.push_back(std::move(x));
    labels.push_back(y);
  }
  return make_dataset(std::move(points), std::move(labels));
}

void save_dataset_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (std::size_t d = 1; d <= data.dim; ++d) out << 'f' << d << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t d = 0; d < data.dim; ++d) {
      double v = data.points[i][d];
      if (!is_missing(v)) out << format_double(v);
      out << ',';
    }
    out << data.labels[i] << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lvq
