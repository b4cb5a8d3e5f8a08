#include "lvq/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lvq {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double phi_derivative(Phi phi, double mu) {
  if (phi == Phi::identity) return 1.0;
  const double s = logistic(mu);
  return s * (1.0 - s);
}

double phi_value(Phi phi, double mu) {
  return phi == Phi::identity ? mu : logistic(mu);
}

double log_sum_exp(const std::vector<double>& v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

struct WinnerPair {
  std::size_t jplus = 0;
  std::size_t jminus = 0;
  double dplus = 0.0;
  double dminus = 0.0;
};

WinnerPair winner_pair(const PrototypeModel& model, std::span<const double> x, int label) {
  WinnerPair wp;
  double best_plus = std::numeric_limits<double>::infinity();
  double best_minus = std::numeric_limits<double>::infinity();
  bool have_plus = false, have_minus = false;
  for (std::size_t j = 0; j < model.num_prototypes(); ++j) {
    const double d = distance(model, j, x);
    if (model.proto_labels[j] == label) {
      if (!have_plus || d < best_plus) {
        best_plus = d;
        wp.jplus = j;
        have_plus = true;
      }
    } else {
      if (!have_minus || d < best_minus) {
        best_minus = d;
        wp.jminus = j;
        have_minus = true;
      }
    }
  }
  if (!have_plus || !have_minus)
    throw std::invalid_argument(
        "margin cost needs a same-class and a different-class prototype for every point");
  wp.dplus = best_plus;
  wp.dminus = best_minus;
  return wp;
}

// x - w with missing components of x contributing zero.
void masked_diff(std::span<const double> x, const Vec& w, Vec& out) {
  for (std::size_t a = 0; a < w.size(); ++a)
    out[a] = is_missing(x[a]) ? 0.0 : x[a] - w[a];
}

// u = Lambda * v computed as Omega^T (Omega v); entries at missing
// dimensions of x are zeroed afterwards by the callers that need it.
void lambda_times(const Matrix& om, const Vec& v, Vec& tmp, Vec& out) {
  const std::size_t m = v.size();
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) s += om(r, a) * v[a];
    tmp[r] = s;
  }
  for (std::size_t a = 0; a < m; ++a) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += om(r, a) * tmp[r];
    out[a] = s;
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-dimension global mean/std and per-class means over present entries.
struct DataStats {
  std::vector<Vec> class_means;  // index z-1
  Vec global_mean;
  Vec global_std;
  double scale2 = 1.0;  // mean squared deviation from the class mean
};

DataStats compute_stats(const LabeledDataset& data) {
  const std::size_t m = data.dim;
  const int z = data.num_classes;
  DataStats st;
  st.global_mean.assign(m, 0.0);
  st.global_std.assign(m, 0.0);
  Vec gcount(m, 0.0);
  std::vector<Vec> sums(z, Vec(m, 0.0)), counts(z, Vec(m, 0.0));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.labels[i] - 1;
    for (std::size_t d = 0; d < m; ++d) {
      const double v = data.points[i][d];
      if (is_missing(v)) continue;
      sums[c][d] += v;
      counts[c][d] += 1.0;
      st.global_mean[d] += v;
      gcount[d] += 1.0;
    }
  }
  for (std::size_t d = 0; d < m; ++d)
    st.global_mean[d] = gcount[d] > 0 ? st.global_mean[d] / gcount[d] : 0.0;
  st.class_means.assign(z, Vec(m, 0.0));
  for (int c = 0; c < z; ++c)
    for (std::size_t d = 0; d < m; ++d)
      st.class_means[c][d] =
          counts[c][d] > 0 ? sums[c][d] / counts[c][d] : st.global_mean[d];

  double sq = 0.0, nsq = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int c = data.labels[i] - 1;
    for (std::size_t d = 0; d < m; ++d) {
      const double v = data.points[i][d];
      if (is_missing(v)) continue;
      const double dv = v - st.class_means[c][d];
      sq += dv * dv;
      const double gv = v - st.global_mean[d];
      st.global_std[d] += gv * gv;
      nsq += 1.0;
    }
  }
  for (std::size_t d = 0; d < m; ++d)
    st.global_std[d] = gcount[d] > 1 ? std::sqrt(st.global_std[d] / gcount[d]) : 0.0;
  st.scale2 = data.empty() ? 1.0 : sq / static_cast<double>(data.size());
  if (!(st.scale2 > 0.0)) st.scale2 = 1.0;
  return st;
}

PrototypeModel init_prototypes(const LabeledDataset& data, const TrainConfig& cfg,
                               MetricKind metric, std::mt19937_64& rng) {
  const DataStats st = compute_stats(data);
  PrototypeModel model;
  model.dim = data.dim;
  model.metric = metric;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int z = 1; z <= data.num_classes; ++z) {
    for (int k = 0; k < cfg.prototypes_per_class; ++k) {
      Vec w = st.class_means[z - 1];
      for (std::size_t d = 0; d < data.dim; ++d)
        w[d] += gauss(rng) * (0.02 * st.global_std[d] + 1e-6);
      model.prototypes.push_back(std::move(w));
      model.proto_labels.push_back(z);
    }
  }
  const std::size_t m = data.dim;
  Matrix om = Matrix::identity(m);
  om.scale(1.0 / std::sqrt(static_cast<double>(m)));  // trace(Lambda) = 1
  if (metric == MetricKind::global_matrix) {
    model.omegas.push_back(om);
  } else if (metric == MetricKind::local_matrices) {
    model.omegas.assign(model.num_prototypes(), om);
  }
  return model;
}

// Rescales the factors so the metric's overall scale is pinned to
// trace(Lambda) = 1: the single global matrix directly, local matrices by a
// common factor (their mean trace) so that relative cell scales -- and with
// them the classification -- are untouched.
void normalize_trace(std::vector<Matrix>& omegas) {
  if (omegas.empty()) return;
  double mean_trace = 0.0;
  for (const auto& om : omegas) {
    const double f = om.frobenius_norm();  // trace(Omega^T Omega) = ||Omega||_F^2
    mean_trace += f * f;
  }
  mean_trace /= static_cast<double>(omegas.size());
  if (!(mean_trace > 0.0)) return;
  const double s = 1.0 / std::sqrt(mean_trace);
  for (auto& om : omegas) om.scale(s);
}

double train_accuracy(const PrototypeModel& model, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (classify(model, data.points[i]).predicted == data.labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

void check_glvq_inputs(const PrototypeModel& model, const LabeledDataset& data) {
  model.validate();
  data.validate();
  if (model.num_classes() < 2)
    throw std::invalid_argument("margin cost requires prototypes of at least two classes");
  if (data.num_classes > model.num_classes())
    throw std::invalid_argument("data contains classes the model does not cover");
}

TrainResult train_glvq_family(const LabeledDataset& data, const TrainConfig& cfg,
                              MetricKind metric) {
  cfg.validate();
  data.validate();
  if (data.empty()) throw std::invalid_argument("training data is empty");
  if (!data.has_all_classes())
    throw std::invalid_argument("every class must appear in the training data");
  if (data.num_classes < 2)
    throw std::invalid_argument("margin-based training needs at least two classes");

  std::mt19937_64 rng(splitmix64(cfg.seed));
  PrototypeModel model = init_prototypes(data, cfg, metric, rng);
  const DataStats st = compute_stats(data);
  const std::size_t m = data.dim;
  const double dim_scale = static_cast<double>(m);

  Vec vp(m), vm(m), up(m), um(m), tp(m), tm(m);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  TrainReport report;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double decay = 1.0 + cfg.lr_decay * epoch;
    const double lr_w = cfg.lr_prototypes * st.scale2 / decay;
    const double lr_m = cfg.lr_metric / (dim_scale * decay);
    std::shuffle(order.begin(), order.end(), rng);

    for (std::size_t i : order) {
      const auto& x = data.points[i];
      const WinnerPair w = winner_pair(model, x, data.labels[i]);
      const double sum = w.dplus + w.dminus;
      if (!(sum > 0.0)) continue;  // point sits on prototypes of both classes
      const double mu = (w.dplus - w.dminus) / sum;
      const double phip = phi_derivative(cfg.phi, mu);
      const double gp = phip * 2.0 * w.dminus / (sum * sum);
      const double gm = phip * 2.0 * w.dplus / (sum * sum);

      masked_diff(x, model.prototypes[w.jplus], vp);
      masked_diff(x, model.prototypes[w.jminus], vm);

      if (metric == MetricKind::euclidean) {
        up = vp;
        um = vm;
      } else {
        const Matrix& omp =
            metric == MetricKind::global_matrix ? model.omegas[0] : model.omegas[w.jplus];
        const Matrix& omm =
            metric == MetricKind::global_matrix ? model.omegas[0] : model.omegas[w.jminus];
        lambda_times(omp, vp, tp, up);
        lambda_times(omm, vm, tm, um);
      }

      for (std::size_t a = 0; a < m; ++a) {
        if (is_missing(x[a])) continue;
        model.prototypes[w.jplus][a] += lr_w * 2.0 * gp * up[a];
        model.prototypes[w.jminus][a] -= lr_w * 2.0 * gm * um[a];
      }

      if (metric != MetricKind::euclidean) {
        Matrix& omp =
            metric == MetricKind::global_matrix ? model.omegas[0] : model.omegas[w.jplus];
        // tp/tm hold Omega*v from before the prototype step.
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t c = 0; c < m; ++c)
            omp(r, c) -= lr_m * 2.0 * gp * tp[r] * vp[c];
        Matrix& omm =
            metric == MetricKind::global_matrix ? model.omegas[0] : model.omegas[w.jminus];
        for (std::size_t r = 0; r < m; ++r)
          for (std::size_t c = 0; c < m; ++c)
            omm(r, c) += lr_m * 2.0 * gm * tm[r] * vm[c];
      }
    }

    normalize_trace(model.omegas);
    report.cost_trace.push_back(glvq_cost(model, data, cfg.phi));
  }

  report.final_train_accuracy = train_accuracy(model, data);
  model.validate();
  return {std::move(model), std::move(report)};
}

// log p(x | j) over the present dimensions of x.
void rslvq_log_densities(const PrototypeModel& model, std::span<const double> x,
                         std::vector<double>& out) {
  const RslvqParams& par = *model.rslvq;
  std::size_t present = 0;
  for (double v : x)
    if (!is_missing(v)) ++present;
  out.resize(model.num_prototypes());
  for (std::size_t j = 0; j < model.num_prototypes(); ++j) {
    const double s2 = par.sigma[j] * par.sigma[j];
    const double d = distance(model, j, x);
    out[j] = -d / (2.0 * s2) -
             0.5 * static_cast<double>(present) * std::log(2.0 * M_PI * s2);
  }
}

void check_rslvq_inputs(const PrototypeModel& model) {
  model.validate();
  if (!model.rslvq) throw std::invalid_argument("model has no RSLVQ parameters");
}

}  // namespace

void TrainConfig::validate() const {
  if (prototypes_per_class < 1)
    throw std::invalid_argument("config: prototypes_per_class must be >= 1");
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (!(lr_prototypes > 0.0) || !(lr_metric > 0.0))
    throw std::invalid_argument("config: learning rates must be positive");
  if (lr_decay < 0.0) throw std::invalid_argument("config: decay must be nonnegative");
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
}

double glvq_cost(const PrototypeModel& model, const LabeledDataset& data, Phi phi) {
  check_glvq_inputs(model, data);
  double cost = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const WinnerPair w = winner_pair(model, data.points[i], data.labels[i]);
    const double sum = w.dplus + w.dminus;
    const double mu = sum > 0.0 ? (w.dplus - w.dminus) / sum : 0.0;
    cost += phi_value(phi, mu);
  }
  return cost;
}

GlvqGradient glvq_cost_gradient(const PrototypeModel& model, const LabeledDataset& data,
                                Phi phi) {
  check_glvq_inputs(model, data);
  const std::size_t m = model.dim;
  GlvqGradient grad;
  grad.prototypes.assign(model.num_prototypes(), Vec(m, 0.0));
  if (model.metric != MetricKind::euclidean)
    grad.omegas.assign(model.omegas.size(), Matrix(m, m, 0.0));

  Vec vp(m), vm(m), up(m), um(m), tp(m), tm(m);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.points[i];
    const WinnerPair w = winner_pair(model, x, data.labels[i]);
    const double sum = w.dplus + w.dminus;
    if (!(sum > 0.0)) continue;
    const double mu = (w.dplus - w.dminus) / sum;
    const double phip = phi_derivative(phi, mu);
    const double gp = phip * 2.0 * w.dminus / (sum * sum);
    const double gm = phip * 2.0 * w.dplus / (sum * sum);

    masked_diff(x, model.prototypes[w.jplus], vp);
    masked_diff(x, model.prototypes[w.jminus], vm);
    if (model.metric == MetricKind::euclidean) {
      up = vp;
      um = vm;
    } else {
      const Matrix& omp = model.metric == MetricKind::global_matrix ? model.omegas[0]
                                                                    : model.omegas[w.jplus];
      const Matrix& omm = model.metric == MetricKind::global_matrix
                              ? model.omegas[0]
                              : model.omegas[w.jminus];
      lambda_times(omp, vp, tp, up);
      lambda_times(omm, vm, tm, um);
    }
    for (std::size_t a = 0; a < m; ++a) {
      if (is_missing(x[a])) continue;
      grad.prototypes[w.jplus][a] += -2.0 * gp * up[a];
      grad.prototypes[w.jminus][a] += 2.0 * gm * um[a];
    }
    if (model.metric != MetricKind::euclidean) {
      Matrix& gomp = model.metric == MetricKind::global_matrix ? grad.omegas[0]
                                                               : grad.omegas[w.jplus];
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) gomp(r, c) += 2.0 * gp * tp[r] * vp[c];
      Matrix& gomm = model.metric == MetricKind::global_matrix ? grad.omegas[0]
                                                               : grad.omegas[w.jminus];
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) gomm(r, c) -= 2.0 * gm * tm[r] * vm[c];
    }
  }
  return grad;
}

TrainResult train_glvq(const LabeledDataset& data, const TrainConfig& config) {
  return train_glvq_family(data, config, MetricKind::euclidean);
}

TrainResult train_gmlvq(const LabeledDataset& data, const TrainConfig& config) {
  return train_glvq_family(data, config, MetricKind::global_matrix);
}

TrainResult train_lgmlvq(const LabeledDataset& data, const TrainConfig& config) {
  return train_glvq_family(data, config, MetricKind::local_matrices);
}

std::vector<double> posterior(const PrototypeModel& model, std::span<const double> x) {
  check_rslvq_inputs(model);
  const RslvqParams& par = *model.rslvq;
  const int z = model.num_classes();
  std::vector<double> lp;
  rslvq_log_densities(model, x, lp);
  std::vector<double> weighted(model.num_prototypes());
  for (std::size_t j = 0; j < model.num_prototypes(); ++j)
    weighted[j] = std::log(par.priors[j]) + lp[j];
  const double log_all = log_sum_exp(weighted);

  std::vector<double> post(z, 0.0);
  std::vector<double> per_class;
  for (int c = 1; c <= z; ++c) {
    per_class.clear();
    for (std::size_t j = 0; j < model.num_prototypes(); ++j)
      if (model.proto_labels[j] == c) per_class.push_back(weighted[j]);
    if (per_class.empty()) continue;
    post[c - 1] = std::exp(log_sum_exp(per_class) - log_all);
  }
  return post;
}

double rslvq_log_likelihood_ratio(const PrototypeModel& model, const LabeledDataset& data) {
  check_rslvq_inputs(model);
  data.validate();
  if (data.num_classes > model.num_classes())
    throw std::invalid_argument("data contains classes the model does not cover");
  const RslvqParams& par = *model.rslvq;
  double loglik = 0.0;
  std::vector<double> lp, weighted, in_class;
  for (std::size_t i = 0; i < data.size(); ++i) {
    rslvq_log_densities(model, data.points[i], lp);
    weighted.resize(lp.size());
    in_class.clear();
    for (std::size_t j = 0; j < lp.size(); ++j) {
      weighted[j] = std::log(par.priors[j]) + lp[j];
      if (model.proto_labels[j] == data.labels[i]) in_class.push_back(weighted[j]);
    }
    loglik += log_sum_exp(in_class) - log_sum_exp(weighted);
  }
  return loglik;
}

std::vector<Vec> rslvq_loglik_gradient(const PrototypeModel& model,
                                       const LabeledDataset& data) {
  check_rslvq_inputs(model);
  data.validate();
  const RslvqParams& par = *model.rslvq;
  const std::size_t m = model.dim;
  std::vector<Vec> grad(model.num_prototypes(), Vec(m, 0.0));
  std::vector<double> lp, weighted, in_class;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.points[i];
    rslvq_log_densities(model, x, lp);
    weighted.resize(lp.size());
    in_class.clear();
    for (std::size_t j = 0; j < lp.size(); ++j) {
      weighted[j] = std::log(par.priors[j]) + lp[j];
      if (model.proto_labels[j] == data.labels[i]) in_class.push_back(weighted[j]);
    }
    const double log_y = log_sum_exp(in_class);
    const double log_all = log_sum_exp(weighted);
    for (std::size_t j = 0; j < lp.size(); ++j) {
      const bool same = model.proto_labels[j] == data.labels[i];
      const double p_y = same ? std::exp(weighted[j] - log_y) : 0.0;
      const double p_all = std::exp(weighted[j] - log_all);
      const double coef = (p_y - p_all) / (par.sigma[j] * par.sigma[j]);
      for (std::size_t a = 0; a < m; ++a) {
        if (is_missing(x[a])) continue;
        grad[j][a] += coef * (x[a] - model.prototypes[j][a]);
      }
    }
  }
  return grad;
}

TrainResult train_rslvq(const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.empty()) throw std::invalid_argument("training data is empty");
  if (!data.has_all_classes())
    throw std::invalid_argument("every class must appear in the training data");

  std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x5157ULL));
  PrototypeModel model = init_prototypes(data, cfg, MetricKind::euclidean, rng);
  RslvqParams par;
  par.sigma.assign(model.num_prototypes(), cfg.sigma);
  par.priors.assign(model.num_prototypes(),
                    1.0 / static_cast<double>(model.num_prototypes()));
  model.rslvq = std::move(par);

  const std::size_t m = data.dim;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> lp, weighted, in_class;

  TrainReport report;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // The sigma^2 in the update cancels the bandwidth scaling of the
    // gradient, leaving steps proportional to (x - w).
    const double lr = cfg.lr_prototypes / (1.0 + cfg.lr_decay * epoch);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto& x = data.points[i];
      rslvq_log_densities(model, x, lp);
      weighted.resize(lp.size());
      in_class.clear();
      for (std::size_t j = 0; j < lp.size(); ++j) {
        weighted[j] = std::log(model.rslvq->priors[j]) + lp[j];
        if (model.proto_labels[j] == data.labels[i]) in_class.push_back(weighted[j]);
      }
      const double log_y = log_sum_exp(in_class);
      const double log_all = log_sum_exp(weighted);
      for (std::size_t j = 0; j < lp.size(); ++j) {
        const bool same = model.proto_labels[j] == data.labels[i];
        const double p_y = same ? std::exp(weighted[j] - log_y) : 0.0;
        const double p_all = std::exp(weighted[j] - log_all);
        const double coef = lr * (p_y - p_all);
        auto& w = model.prototypes[j];
        for (std::size_t a = 0; a < m; ++a) {
          if (is_missing(x[a])) continue;
          w[a] += coef * (x[a] - w[a]);
        }
      }
    }
    report.cost_trace.push_back(rslvq_log_likelihood_ratio(model, data));
  }

  report.final_train_accuracy = train_accuracy(model, data);
  model.validate();
  return {std::move(model), std::move(report)};
}

}  // namespace lvq
