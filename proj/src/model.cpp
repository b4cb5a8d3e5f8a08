#include "lvq/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lvq {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

void Matrix::scale(double s) {
  for (double& v : data) v *= s;
}

Matrix gram_product(const Matrix& omega) {
  Matrix lam(omega.cols, omega.cols);
  for (std::size_t a = 0; a < omega.cols; ++a)
    for (std::size_t b = 0; b < omega.cols; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < omega.rows; ++k) s += omega(k, a) * omega(k, b);
      lam(a, b) = s;
    }
  return lam;
}

const char* metric_kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::global_matrix: return "global";
    case MetricKind::local_matrices: return "local";
  }
  return "?";
}

int PrototypeModel::num_classes() const {
  int z = 0;
  for (int y : proto_labels) z = std::max(z, y);
  return z;
}

Matrix PrototypeModel::lambda(std::size_t j) const {
  switch (metric) {
    case MetricKind::euclidean: return Matrix::identity(dim);
    case MetricKind::global_matrix: return gram_product(omegas.at(0));
    case MetricKind::local_matrices: return gram_product(omegas.at(j));
  }
  throw std::logic_error("bad metric kind");
}

void PrototypeModel::validate() const {
  if (prototypes.empty()) throw std::invalid_argument("model: no prototypes");
  if (prototypes.size() != proto_labels.size())
    throw std::invalid_argument("model: prototypes/labels size mismatch");
  for (const auto& w : prototypes) {
    if (w.size() != dim) throw std::invalid_argument("model: prototype dimension mismatch");
    for (double v : w)
      if (!std::isfinite(v)) throw std::invalid_argument("model: non-finite prototype");
  }
  std::set<int> classes(proto_labels.begin(), proto_labels.end());
  const int z = num_classes();
  for (int y = 1; y <= z; ++y)
    if (!classes.count(y))
      throw std::invalid_argument("model: class without prototype");
  switch (metric) {
    case MetricKind::euclidean:
      if (!omegas.empty()) throw std::invalid_argument("model: unexpected metric matrix");
      break;
    case MetricKind::global_matrix:
      if (omegas.size() != 1) throw std::invalid_argument("model: expected one metric factor");
      break;
    case MetricKind::local_matrices:
      if (omegas.size() != prototypes.size())
        throw std::invalid_argument("model: expected one metric factor per prototype");
      break;
  }
  for (const auto& om : omegas) {
    if (om.cols != dim || om.rows != dim)
      throw std::invalid_argument("model: metric factor must be dim x dim");
    for (double v : om.data)
      if (!std::isfinite(v)) throw std::invalid_argument("model: non-finite metric entry");
  }
  if (rslvq) {
    if (rslvq->sigma.size() != prototypes.size() ||
        rslvq->priors.size() != prototypes.size())
      throw std::invalid_argument("model: rslvq parameter size mismatch");
    double sum = 0.0;
    for (double p : rslvq->priors) {
      if (p < 0.0) throw std::invalid_argument("model: negative prior");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("model: priors must sum to 1");
    for (double s : rslvq->sigma)
      if (!(s > 0.0)) throw std::invalid_argument("model: bandwidth must be positive");
  }
}

double distance(const PrototypeModel& model, std::size_t j, std::span<const double> x) {
  if (j >= model.num_prototypes()) throw std::invalid_argument("distance: bad prototype index");
  if (x.size() != model.dim) throw std::invalid_argument("distance: dimension mismatch");
  const Vec& w = model.prototypes[j];
  const std::size_t m = model.dim;

  if (model.metric == MetricKind::euclidean) {
    double d = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      if (is_missing(x[a])) continue;
      const double v = x[a] - w[a];
      d += v * v;
    }
    return d;
  }

  const Matrix& om =
      model.metric == MetricKind::global_matrix ? model.omegas[0] : model.omegas[j];
  // d = ||Omega * v||^2 with the missing components of v zeroed, which is
  // the quadratic form with the rows/columns of Lambda touching a missing
  // dimension excluded.
  double d = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      if (is_missing(x[a])) continue;
      s += om(r, a) * (x[a] - w[a]);
    }
    d += s * s;
  }
  return d;
}

ClassificationOutcome classify(const PrototypeModel& model, std::span<const double> x) {
  std::size_t best = 0;
  double best_d = distance(model, 0, x);
  for (std::size_t j = 1; j < model.num_prototypes(); ++j) {
    const double d = distance(model, j, x);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  ClassificationOutcome out;
  out.cell = best;
  out.predicted = model.proto_labels[best];
  return out;
}

ClassificationOutcome classify(const PrototypeModel& model, std::span<const double> x,
                               int true_label) {
  ClassificationOutcome out = classify(model, x);
  out.correct = out.predicted == true_label;
  return out;
}

std::vector<std::size_t> voronoi_partition(const PrototypeModel& model,
                                           const LabeledDataset& data) {
  std::vector<std::size_t> cells(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    cells[i] = classify(model, data.points[i]).cell;
  return cells;
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> out;
  std::string t;
  while (iss >> t) out.push_back(t);
  return out;
}

double parse_num(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::runtime_error("model file: bad number '" + s + "'");
  return v;
}

}  // namespace

void save_model(const PrototypeModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << "lvq-model 1\n";
  out << "dim " << model.dim << '\n';
  out << "prototypes " << model.num_prototypes() << '\n';
  out << "metric " << metric_kind_name(model.metric) << '\n';
  for (std::size_t j = 0; j < model.num_prototypes(); ++j) {
    out << "proto " << model.proto_labels[j];
    for (double v : model.prototypes[j]) out << ' ' << format_double(v);
    out << '\n';
  }
  for (const auto& om : model.omegas) {
    out << "omega";
    for (double v : om.data) out << ' ' << format_double(v);
    out << '\n';
  }
  if (model.rslvq) {
    out << "sigma";
    for (double v : model.rslvq->sigma) out << ' ' << format_double(v);
    out << '\n';
    out << "priors";
    for (double v : model.rslvq->priors) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

PrototypeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || tokens(line) != std::vector<std::string>{"lvq-model", "1"})
    throw std::runtime_error("model file: bad magic line");

  PrototypeModel model;
  std::size_t xi = 0;
  std::vector<double> sigmas, priors;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto tok = tokens(line);
    const std::string& key = tok.at(0);
    if (key == "dim") {
      model.dim = static_cast<std::size_t>(std::stoul(tok.at(1)));
    } else if (key == "prototypes") {
      xi = static_cast<std::size_t>(std::stoul(tok.at(1)));
    } else if (key == "metric") {
      const std::string& k = tok.at(1);
      if (k == "euclidean") model.metric = MetricKind::euclidean;
      else if (k == "global") model.metric = MetricKind::global_matrix;
      else if (k == "local") model.metric = MetricKind::local_matrices;
      else throw std::runtime_error("model file: unknown metric '" + k + "'");
    } else if (key == "proto") {
      if (tok.size() != model.dim + 2)
        throw std::runtime_error("model file: bad prototype row");
      model.proto_labels.push_back(std::stoi(tok.at(1)));
      Vec w(model.dim);
      for (std::size_t d = 0; d < model.dim; ++d) w[d] = parse_num(tok[d + 2]);
      model.prototypes.push_back(std::move(w));
    } else if (key == "omega") {
      if (tok.size() != model.dim * model.dim + 1)
        throw std::runtime_error("model file: bad omega row");
      Matrix om(model.dim, model.dim);
      for (std::size_t i = 0; i < om.data.size(); ++i) om.data[i] = parse_num(tok[i + 1]);
      model.omegas.push_back(std::move(om));
    } else if (key == "sigma") {
      for (std::size_t i = 1; i < tok.size(); ++i) sigmas.push_back(parse_num(tok[i]));
    } else if (key == "priors") {
      for (std::size_t i = 1; i < tok.size(); ++i) priors.push_back(parse_num(tok[i]));
    } else {
      throw std::runtime_error("model file: unknown key '" + key + "'");
    }
  }
  if (model.num_prototypes() != xi)
    throw std::runtime_error("model file: prototype count mismatch");
  if (!sigmas.empty() || !priors.empty()) {
    RslvqParams params;
    params.sigma = std::move(sigmas);
    params.priors = std::move(priors);
    model.rslvq = std::move(params);
  }
  model.validate();
  return model;
}

}  // namespace lvq
