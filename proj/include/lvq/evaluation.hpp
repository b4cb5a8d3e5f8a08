#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lvq/certainty.hpp"
#include "lvq/classifiers.hpp"
#include "lvq/reject.hpp"

namespace lvq {

enum class ModelKind { glvq, gmlvq, lgmlvq, rslvq };
enum class RejectScheme { global, local_dp, local_greedy };
enum class Provenance { global, local_dp, local_greedy, bayes };

const char* model_kind_name(ModelKind k);
const char* reject_scheme_name(RejectScheme s);
const char* provenance_name(Provenance p);

struct ArcPoint {
  double classified_fraction = 0.0;  // t_c
  double accuracy = 0.0;             // t_a
};

/// Accuracy-reject curve: t_a against t_c, t_c strictly decreasing and
/// starting at 1 (the no-reject operating point).
struct ARCCurve {
  std::vector<ArcPoint> points;
  Provenance provenance = Provenance::global;
};

/// Mean curve on a fixed t_c grid; grid points kept only when at least
/// `min_support` runs deliver a value there.
struct AveragedARC {
  std::vector<double> grid;
  std::vector<double> mean_accuracy;
  std::vector<int> support;
  Provenance provenance = Provenance::global;
};

/// ARC of a front on the data it was built from: per entry (n, t) the pair
/// (t_c, t_a) = ((|X|-n-t)/|X|, (|L|-n)/(|X|-n-t)); empty-remainder entries
/// are dropped and the curve always starts at (1, |L|/|X|).
ARCCurve arc_from_front(const ThresholdFront& front, int n_correct, int n_errors,
                        Provenance provenance);

/// Keeps an entry iff its true-reject count strictly exceeds every
/// smaller-n entry's.
ThresholdFront pareto_extract(const ThresholdFront& front);

/// Fold id (0..folds-1) per point; each class is dealt round-robin after a
/// seeded shuffle so folds are stratified.
std::vector<int> stratified_fold_assignment(const std::vector<int>& labels,
                                            int num_classes, int folds,
                                            std::mt19937_64& rng);

TrainResult train_model(ModelKind kind, const LabeledDataset& data,
                        const TrainConfig& config);

/// Repeated stratified cross-validation: per run, train on folds-1 folds,
/// optimize thresholds on the same training data, evaluate the resulting
/// threshold vectors on the held-out fold. Returns folds*repeats curves.
/// `mix` is required for the Bayes-oracle measure.
std::vector<ARCCurve> cross_validate(const LabeledDataset& data, ModelKind model,
                                     CertaintyMeasure measure, RejectScheme scheme,
                                     int folds, int repeats, std::uint64_t seed,
                                     const TrainConfig& config,
                                     const GenerativeMixture* mix = nullptr);

/// Gold-standard reference: the Bayes classifier of the true mixture with
/// Chow's certainty and a global reject threshold, run through the same
/// cross-validation protocol (thresholds picked on the training folds).
std::vector<ARCCurve> bayes_reference_curves(const LabeledDataset& data,
                                             const GenerativeMixture& mix, int folds,
                                             int repeats, std::uint64_t seed);

/// Step-interpolates every curve onto a common t_c grid (step `grid_step`,
/// right-continuous staircase); a curve delivers a value at a grid point iff
/// its smallest t_c reaches it.
AveragedARC average_arcs(const std::vector<ARCCurve>& curves, double grid_step = 0.01,
                         int min_support = 80);

/// Mean accuracy of an averaged curve at one grid value; NaN when absent.
double averaged_value_at(const AveragedARC& arc, double t_c);

/// CSV columns: t_c,t_a,support,provenance.
void save_arc_csv(const std::vector<AveragedARC>& arcs, const std::string& path);

}  // namespace lvq
