#include "lvq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lvq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix64(a ^ splitmix64(b ^ splitmix64(c)));
}

constexpr double kGridEps = 1e-12;

// One cross-validation run's classifier outputs on a point set.
struct ScoredSet {
  std::vector<double> scores;
  std::vector<bool> correct;
  std::vector<std::size_t> cells;
  int n_correct = 0;
};

ScoredSet score_with_model(const PrototypeModel& model, CertaintyMeasure measure,
                           const GenerativeMixture* mix, const LabeledDataset& data) {
  ScoredSet s;
  s.scores = certainty_scores(measure, &model, mix, data);
  s.correct.resize(data.size());
  s.cells.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto out = classify(model, data.points[i], data.labels[i]);
    s.cells[i] = out.cell;
    s.correct[i] = out.correct;
    if (out.correct) ++s.n_correct;
  }
  return s;
}

ScoredSet score_with_bayes(const GenerativeMixture& mix, const LabeledDataset& data) {
  ScoredSet s;
  s.scores.resize(data.size());
  s.correct.resize(data.size());
  s.cells.assign(data.size(), 0);  // one global cell
  for (std::size_t i = 0; i < data.size(); ++i) {
    s.scores[i] = bayes_certainty(mix, data.points[i]);
    s.correct[i] = bayes_classify(mix, data.points[i]) == data.labels[i];
    if (s.correct[i]) ++s.n_correct;
  }
  return s;
}

ThresholdFront build_front(const ScoredSet& train, std::size_t num_cells,
                           RejectScheme scheme) {
  if (scheme == RejectScheme::global) {
    const std::vector<std::size_t> one_cell(train.scores.size(), 0);
    const auto profiles = build_profiles(train.scores, train.correct, one_cell, 1);
    return global_front(profiles[0]);
  }
  const auto profiles = build_profiles(train.scores, train.correct, train.cells, num_cells);
  return scheme == RejectScheme::local_dp ? dp_local_front(profiles)
                                          : greedy_local_front(profiles);
}

// Evaluates a front's threshold vectors on a (possibly different) point
// set. Applied to the set the front was built on this reproduces the
// front's own (n, t) pairs exactly.
ARCCurve curve_on_set(const ThresholdFront& front, const ScoredSet& set, bool global,
                      Provenance prov) {
  const auto total = static_cast<double>(set.scores.size());
  const int n_correct = set.n_correct;
  std::vector<std::size_t> cells;
  if (global) cells.assign(set.scores.size(), 0);

  std::vector<ArcPoint> raw;
  raw.push_back({1.0, n_correct / total});  // the no-reject operating point
  for (const auto& e : front.entries) {
    const auto [nf, nt] =
        count_rejects(set.scores, set.correct, global ? cells : set.cells, e.thresholds);
    const auto remaining = static_cast<double>(set.scores.size()) - nf - nt;
    if (remaining <= 0.0) continue;
    raw.push_back({remaining / total, (n_correct - nf) / remaining});
  }
  std::stable_sort(raw.begin(), raw.end(), [](const ArcPoint& a, const ArcPoint& b) {
    return a.classified_fraction > b.classified_fraction;
  });
  ARCCurve curve;
  curve.provenance = prov;
  for (const auto& p : raw) {
    if (!curve.points.empty() &&
        p.classified_fraction >= curve.points.back().classified_fraction - kGridEps)
      continue;  // keep the first point per classified fraction
    curve.points.push_back(p);
  }
  return curve;
}

Provenance scheme_provenance(RejectScheme s) {
  switch (s) {
    case RejectScheme::global: return Provenance::global;
    case RejectScheme::local_dp: return Provenance::local_dp;
    case RejectScheme::local_greedy: return Provenance::local_greedy;
  }
  return Provenance::global;
}

void check_cv_args(const LabeledDataset& data, int folds, int repeats) {
  data.validate();
  if (folds < 2) throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (repeats < 1) throw std::invalid_argument("cross-validation needs at least 1 repeat");
  for (std::size_t c : data.class_counts())
    if (c < static_cast<std::size_t>(folds))
      throw std::invalid_argument(
          "a class has fewer members than folds; stratification impossible");
}

// Runs fan out over a fixed worker count; each run owns a seed derived from
// (seed, repeat, fold), so results do not depend on the schedule.
template <typename Fn>
void parallel_runs(int total, Fn&& fn) {
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(total)));
  if (workers == 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = static_cast<int>(w); i < total; i += static_cast<int>(workers)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

const char* model_kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::glvq: return "glvq";
    case ModelKind::gmlvq: return "gmlvq";
    case ModelKind::lgmlvq: return "lgmlvq";
    case ModelKind::rslvq: return "rslvq";
  }
  return "?";
}

const char* reject_scheme_name(RejectScheme s) {
  switch (s) {
    case RejectScheme::global: return "global";
    case RejectScheme::local_dp: return "local-dp";
    case RejectScheme::local_greedy: return "local-greedy";
  }
  return "?";
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::global: return "global";
    case Provenance::local_dp: return "local-dp";
    case Provenance::local_greedy: return "local-greedy";
    case Provenance::bayes: return "bayes";
  }
  return "?";
}

ARCCurve arc_from_front(const ThresholdFront& front, int n_correct, int n_errors,
                        Provenance provenance) {
  if (n_correct < 0 || n_errors < 0)
    throw std::invalid_argument("arc_from_front: negative counts");
  const int total = n_correct + n_errors;
  if (total == 0) throw std::invalid_argument("arc_from_front: empty data");
  ARCCurve curve;
  curve.provenance = provenance;
  const bool starts_at_origin =
      !front.entries.empty() && front.entries.front().false_rejects == 0 &&
      front.entries.front().true_rejects == 0;
  if (!starts_at_origin)
    curve.points.push_back(
        {1.0, static_cast<double>(n_correct) / static_cast<double>(total)});
  for (const auto& e : front.entries) {
    const int remaining = total - e.false_rejects - e.true_rejects;
    if (remaining <= 0) continue;  // the all-rejected setting is not displayed
    curve.points.push_back(
        {static_cast<double>(remaining) / static_cast<double>(total),
         static_cast<double>(n_correct - e.false_rejects) / static_cast<double>(remaining)});
  }
  return curve;
}

ThresholdFront pareto_extract(const ThresholdFront& front) {
  ThresholdFront out;
  out.kind = FrontKind::pareto;
  int best = std::numeric_limits<int>::min();
  for (const auto& e : front.entries) {
    if (e.true_rejects > best) {
      best = e.true_rejects;
      out.entries.push_back(e);
    }
  }
  return out;
}

std::vector<int> stratified_fold_assignment(const std::vector<int>& labels,
                                            int num_classes, int folds,
                                            std::mt19937_64& rng) {
  if (folds < 2) throw std::invalid_argument("stratification needs at least 2 folds");
  std::vector<int> fold_of(labels.size(), -1);
  for (int z = 1; z <= num_classes; ++z) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == z) members.push_back(i);
    if (members.size() < static_cast<std::size_t>(folds))
      throw std::invalid_argument("class " + std::to_string(z) +
                                  " has fewer members than folds");
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < members.size(); ++k)
      fold_of[members[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

TrainResult train_model(ModelKind kind, const LabeledDataset& data,
                        const TrainConfig& config) {
  switch (kind) {
    case ModelKind::glvq: return train_glvq(data, config);
    case ModelKind::gmlvq: return train_gmlvq(data, config);
    case ModelKind::lgmlvq: return train_lgmlvq(data, config);
    case ModelKind::rslvq: return train_rslvq(data, config);
  }
  throw std::logic_error("bad model kind");
}

std::vector<ARCCurve> cross_validate(const LabeledDataset& data, ModelKind model,
                                     CertaintyMeasure measure, RejectScheme scheme,
                                     int folds, int repeats, std::uint64_t seed,
                                     const TrainConfig& config,
                                     const GenerativeMixture* mix) {
  check_cv_args(data, folds, repeats);
  if (measure == CertaintyMeasure::conf && model != ModelKind::rslvq)
    throw std::invalid_argument("the conf measure requires an RSLVQ model");
  if (measure == CertaintyMeasure::bayes_oracle && mix == nullptr)
    throw std::invalid_argument("the Bayes-oracle measure requires the true mixture");

  // Fold assignments per repeat, fixed up front so workers share them.
  std::vector<std::vector<int>> fold_of(repeats);
  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r), 0xF01D));
    fold_of[r] = stratified_fold_assignment(data.labels, data.num_classes, folds, rng);
  }

  const int total = folds * repeats;
  std::vector<ARCCurve> curves(static_cast<std::size_t>(total));
  const Provenance prov = scheme_provenance(scheme);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  parallel_runs(total, [&](int run) {
    try {
      const int r = run / folds;
      const int f = run % folds;
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < data.size(); ++i)
        (fold_of[r][i] == f ? test_rows : train_rows).push_back(i);
      const LabeledDataset train_data = data.subset(train_rows);
      const LabeledDataset test_data = data.subset(test_rows);

      TrainConfig run_cfg = config;
      run_cfg.seed = mix_seed(seed, static_cast<std::uint64_t>(r) + 1,
                              static_cast<std::uint64_t>(f) + 1);
      const TrainResult trained = train_model(model, train_data, run_cfg);

      const ScoredSet train_scored = score_with_model(trained.model, measure, mix, train_data);
      const ThresholdFront front =
          build_front(train_scored, trained.model.num_prototypes(), scheme);
      const ScoredSet test_scored = score_with_model(trained.model, measure, mix, test_data);
      curves[static_cast<std::size_t>(run)] =
          curve_on_set(front, test_scored, scheme == RejectScheme::global, prov);
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return curves;
}

std::vector<ARCCurve> bayes_reference_curves(const LabeledDataset& data,
                                             const GenerativeMixture& mix, int folds,
                                             int repeats, std::uint64_t seed) {
  check_cv_args(data, folds, repeats);
  std::vector<ARCCurve> curves;
  curves.reserve(static_cast<std::size_t>(folds) * repeats);
  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r), 0xF01D));
    const auto fold_of = stratified_fold_assignment(data.labels, data.num_classes, folds, rng);
    for (int f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < data.size(); ++i)
        (fold_of[i] == f ? test_rows : train_rows).push_back(i);
      const ScoredSet train_scored = score_with_bayes(mix, data.subset(train_rows));
      const ThresholdFront front = build_front(train_scored, 1, RejectScheme::global);
      const ScoredSet test_scored = score_with_bayes(mix, data.subset(test_rows));
      curves.push_back(curve_on_set(front, test_scored, true, Provenance::bayes));
    }
  }
  return curves;
}

AveragedARC average_arcs(const std::vector<ARCCurve>& curves, double grid_step,
                         int min_support) {
  if (curves.empty()) throw std::invalid_argument("average_arcs: no curves");
  if (!(grid_step > 0.0) || grid_step > 1.0)
    throw std::invalid_argument("average_arcs: bad grid step");
  const int cells = static_cast<int>(std::llround(1.0 / grid_step));
  AveragedARC out;
  out.provenance = curves.front().provenance;

  for (int k = 0; k <= cells; ++k) {
    const double g = 1.0 - static_cast<double>(k) * grid_step;
    double sum = 0.0;
    int support = 0;
    for (const auto& curve : curves) {
      if (curve.points.empty()) continue;
      // The curve delivers a value here only if its thresholds push the
      // classified fraction at least this low.
      if (curve.points.back().classified_fraction > g + kGridEps) continue;
      // Right-continuous staircase: hold the value of the largest realized
      // t_c that does not exceed the grid point.
      for (const auto& p : curve.points) {
        if (p.classified_fraction <= g + kGridEps) {
          sum += p.accuracy;
          ++support;
          break;
        }
      }
    }
    if (support >= min_support) {
      out.grid.push_back(g);
      out.mean_accuracy.push_back(sum / support);
      out.support.push_back(support);
    }
  }
  return out;
}

double averaged_value_at(const AveragedARC& arc, double t_c) {
  for (std::size_t i = 0; i < arc.grid.size(); ++i)
    if (std::abs(arc.grid[i] - t_c) <= kGridEps + 1e-9) return arc.mean_accuracy[i];
  return std::numeric_limits<double>::quiet_NaN();
}

void save_arc_csv(const std::vector<AveragedARC>& arcs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write ARC file: " + path);
  out << "t_c,t_a,support,provenance\n";
  for (const auto& arc : arcs)
    for (std::size_t i = 0; i < arc.grid.size(); ++i)
      out << format_double(arc.grid[i]) << ',' << format_double(arc.mean_accuracy[i]) << ','
          << arc.support[i] << ',' << provenance_name(arc.provenance) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace lvq
