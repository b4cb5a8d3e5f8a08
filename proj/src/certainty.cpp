#include "lvq/certainty.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lvq/classifiers.hpp"

namespace lvq {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double log_sum_exp2(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log(std::exp(a - mx) + std::exp(b - mx));
}

}  // namespace

const char* measure_name(CertaintyMeasure m) {
  switch (m) {
    case CertaintyMeasure::relsim: return "relsim";
    case CertaintyMeasure::conf: return "conf";
    case CertaintyMeasure::bayes_oracle: return "bayes";
  }
  return "?";
}

double relsim(const PrototypeModel& model, std::span<const double> x) {
  if (model.num_classes() < 2)
    throw std::invalid_argument("relsim requires prototypes of at least two classes");
  const std::size_t xi = model.num_prototypes();
  std::size_t best = 0;
  double dplus = distance(model, 0, x);
  for (std::size_t j = 1; j < xi; ++j) {
    const double d = distance(model, j, x);
    if (d < dplus) {
      dplus = d;
      best = j;
    }
  }
  const int predicted = model.proto_labels[best];
  double dminus = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < xi; ++j) {
    if (model.proto_labels[j] == predicted) continue;
    dminus = std::min(dminus, distance(model, j, x));
  }
  const double sum = dplus + dminus;
  if (!(sum > 0.0)) return 0.0;  // coincides with prototypes of two classes
  return (dminus - dplus) / sum;
}

double conf(const PrototypeModel& model, std::span<const double> x) {
  const std::vector<double> post = posterior(model, x);
  return *std::max_element(post.begin(), post.end());
}

void GenerativeMixture::validate() const {
  if (num_classes < 1) throw std::invalid_argument("mixture: no classes");
  double total = noise ? noise->mass : 0.0;
  if (noise) {
    if (noise->mass < 0.0) throw std::invalid_argument("mixture: negative noise mass");
    if (noise->lo.size() != dim || noise->hi.size() != dim)
      throw std::invalid_argument("mixture: noise box dimension mismatch");
    for (std::size_t d = 0; d < dim; ++d)
      if (!(noise->hi[d] > noise->lo[d]))
        throw std::invalid_argument("mixture: empty noise box");
  }
  for (const auto& c : components) {
    if (c.mean.size() != dim || c.stddev.size() != dim)
      throw std::invalid_argument("mixture: component dimension mismatch");
    for (double s : c.stddev)
      if (!(s > 0.0)) throw std::invalid_argument("mixture: stddev must be positive");
    if (c.prior < 0.0) throw std::invalid_argument("mixture: negative prior");
    if (c.label < 1 || c.label > num_classes)
      throw std::invalid_argument("mixture: component label out of range");
    total += c.prior;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("mixture: priors must sum to 1");
}

std::vector<double> mixture_class_posterior(const GenerativeMixture& mix,
                                            std::span<const double> x) {
  if (x.size() != mix.dim) throw std::invalid_argument("mixture: dimension mismatch");
  const int z = mix.num_classes;
  std::vector<double> class_log(z, kNegInf);
  std::vector<double> acc;
  for (int c = 1; c <= z; ++c) {
    acc.clear();
    for (const auto& comp : mix.components) {
      if (comp.label != c || comp.prior <= 0.0) continue;
      double lp = std::log(comp.prior);
      for (std::size_t d = 0; d < mix.dim; ++d) {
        if (is_missing(x[d])) continue;
        const double u = (x[d] - comp.mean[d]) / comp.stddev[d];
        lp += -0.5 * u * u - std::log(comp.stddev[d] * std::sqrt(2.0 * M_PI));
      }
      acc.push_back(lp);
    }
    class_log[c - 1] = log_sum_exp(acc);
  }

  if (mix.noise && mix.noise->mass > 0.0) {
    // Uniform overlay; its mass is split evenly across the classes.
    bool inside = true;
    double log_vol = 0.0;
    for (std::size_t d = 0; d < mix.dim; ++d) {
      if (is_missing(x[d])) continue;
      if (x[d] < mix.noise->lo[d] || x[d] > mix.noise->hi[d]) inside = false;
      log_vol += std::log(mix.noise->hi[d] - mix.noise->lo[d]);
    }
    if (inside) {
      const double log_noise =
          std::log(mix.noise->mass / static_cast<double>(z)) - log_vol;
      for (int c = 0; c < z; ++c)
        class_log[c] = log_sum_exp2(class_log[c], log_noise);
    }
  }

  const double log_all = log_sum_exp(class_log);
  std::vector<double> post(z);
  if (!std::isfinite(log_all)) {
    std::fill(post.begin(), post.end(), 1.0 / static_cast<double>(z));
    return post;
  }
  for (int c = 0; c < z; ++c) post[c] = std::exp(class_log[c] - log_all);
  return post;
}

double bayes_certainty(const GenerativeMixture& mix, std::span<const double> x) {
  const auto post = mixture_class_posterior(mix, x);
  return *std::max_element(post.begin(), post.end());
}

int bayes_classify(const GenerativeMixture& mix, std::span<const double> x) {
  const auto post = mixture_class_posterior(mix, x);
  return static_cast<int>(std::max_element(post.begin(), post.end()) - post.begin()) + 1;
}

void save_mixture(const GenerativeMixture& mix, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mixture file: " + path);
  out << "lvq-mixture 1\n";
  out << "dim " << mix.dim << '\n';
  out << "classes " << mix.num_classes << '\n';
  for (const auto& c : mix.components) {
    out << "comp " << c.label << ' ' << format_double(c.prior);
    for (double v : c.mean) out << ' ' << format_double(v);
    for (double v : c.stddev) out << ' ' << format_double(v);
    out << '\n';
  }
  if (mix.noise) {
    out << "noise " << format_double(mix.noise->mass);
    for (double v : mix.noise->lo) out << ' ' << format_double(v);
    for (double v : mix.noise->hi) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

GenerativeMixture load_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mixture file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "lvq-mixture 1")
    throw std::runtime_error("mixture file: bad magic line");
  GenerativeMixture mix;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string key;
    iss >> key;
    if (key == "dim") {
      iss >> mix.dim;
    } else if (key == "classes") {
      iss >> mix.num_classes;
    } else if (key == "comp") {
      MixtureComponent c;
      iss >> c.label >> c.prior;
      c.mean.resize(mix.dim);
      c.stddev.resize(mix.dim);
      for (auto& v : c.mean) iss >> v;
      for (auto& v : c.stddev) iss >> v;
      if (!iss) throw std::runtime_error("mixture file: bad component row");
      mix.components.push_back(std::move(c));
    } else if (key == "noise") {
      UniformNoise n;
      iss >> n.mass;
      n.lo.resize(mix.dim);
      n.hi.resize(mix.dim);
      for (auto& v : n.lo) iss >> v;
      for (auto& v : n.hi) iss >> v;
      if (!iss) throw std::runtime_error("mixture file: bad noise row");
      mix.noise = std::move(n);
    } else {
      throw std::runtime_error("mixture file: unknown key '" + key + "'");
    }
  }
  mix.validate();
  return mix;
}

std::vector<double> certainty_scores(CertaintyMeasure measure, const PrototypeModel* model,
                                     const GenerativeMixture* mix,
                                     const LabeledDataset& data) {
  std::vector<double> scores(data.size());
  switch (measure) {
    case CertaintyMeasure::relsim:
      if (!model) throw std::invalid_argument("relsim needs a model");
      for (std::size_t i = 0; i < data.size(); ++i)
        scores[i] = relsim(*model, data.points[i]);
      break;
    case CertaintyMeasure::conf:
      if (!model) throw std::invalid_argument("conf needs a model");
      for (std::size_t i = 0; i < data.size(); ++i)
        scores[i] = conf(*model, data.points[i]);
      break;
    case CertaintyMeasure::bayes_oracle:
      if (!mix) throw std::invalid_argument("the Bayes oracle needs the true mixture");
      for (std::size_t i = 0; i < data.size(); ++i)
        scores[i] = bayes_certainty(*mix, data.points[i]);
      break;
  }
  return scores;
}

}  // namespace lvq
