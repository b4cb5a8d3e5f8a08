#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lvq {

/// Candidate reject thresholds of one Voronoi cell: the certainty values of
/// its correctly classified points in ascending order, with +inf appended
/// when the most-certain point of the cell is an error. Raising the
/// threshold to index i rejects exactly i correct points (false rejects)
/// and true_rejects[i] errors.
struct CellRejectProfile {
  std::size_t cell = 0;
  std::vector<double> thresholds;   // ascending; last entry may be +inf
  std::vector<int> true_rejects;    // cumulative, same length as thresholds
  int n_correct = 0;                // |L_j|
  int n_errors = 0;                 // |E_j|

  int max_index() const { return static_cast<int>(thresholds.size()) - 1; }
  void validate() const;
};

/// Sorting rule for equal certainty values: correct points first, then by
/// point index. Empty cells get the trivial single-threshold profile.
std::vector<CellRejectProfile> build_profiles(const std::vector<double>& scores,
                                              const std::vector<bool>& correct,
                                              const std::vector<std::size_t>& cells,
                                              std::size_t num_cells);

enum class FrontKind { pseudo, pareto };

struct FrontEntry {
  int false_rejects = 0;           // n
  int true_rejects = 0;            // t
  std::vector<double> thresholds;  // one per cell
  std::vector<int> indices;        // per-cell threshold index realizing (n, t)
};

/// (Pseudo-)Pareto front of reject thresholds: per false-reject count n the
/// best achievable true-reject count and a realizing threshold vector.
struct ThresholdFront {
  std::vector<FrontEntry> entries;  // sorted by false_rejects, strictly increasing
  FrontKind kind = FrontKind::pseudo;
};

/// Front of a single profile covering the whole data set (global threshold).
ThresholdFront global_front(const CellRejectProfile& profile);

/// Exact pseudo-Pareto front over per-cell thresholds, via the Bellman
/// recursion on opt(n, j) with back-tracing of the realizing vectors.
/// O(|L| * xi * max_j |Theta_j|) time, O(|L| * xi) memory.
ThresholdFront dp_local_front(const std::vector<CellRejectProfile>& profiles);

/// Greedy approximation: repeatedly takes the cell with the best immediate
/// gain, comparing against a full reallocation of the false-reject budget
/// into a single cell; ties are broken by increasing the lookahead until the
/// best cell is unique. O(|L| * xi) time, O(xi) memory. False-reject counts
/// may skip values; entries are realizable but not necessarily optimal.
ThresholdFront greedy_local_front(const std::vector<CellRejectProfile>& profiles);

/// Exhaustive enumeration of all threshold-index combinations; ground-truth
/// oracle for dp_local_front. Refuses instances with more than `cap`
/// combinations.
ThresholdFront brute_force_front(const std::vector<CellRejectProfile>& profiles,
                                 std::uint64_t cap = 10'000'000);

struct RejectSplit {
  std::vector<std::size_t> rejected;
  std::vector<std::size_t> accepted;
};

/// Point i is rejected iff scores[i] < thresholds[cells[i]].
RejectSplit apply_thresholds(const std::vector<double>& scores,
                             const std::vector<std::size_t>& cells,
                             const std::vector<double>& thresholds);

/// (false rejects, true rejects) of a threshold vector.
std::pair<int, int> count_rejects(const std::vector<double>& scores,
                                  const std::vector<bool>& correct,
                                  const std::vector<std::size_t>& cells,
                                  const std::vector<double>& thresholds);

/// CSV columns: n_false,n_true,theta_1..theta_xi ("inf" for the sentinel).
void save_front_csv(const ThresholdFront& front, const std::string& path);

/// Random scored instance for the oracle-equivalence check: cells, scores
/// in [0, 1) and a correctness flag per point.
struct RejectInstance {
  std::vector<double> scores;
  std::vector<bool> correct;
  std::vector<std::size_t> cells;
  std::size_t num_cells = 1;
};

RejectInstance random_reject_instance(std::mt19937_64& rng, std::size_t max_cells,
                                      std::size_t max_points);

}  // namespace lvq
