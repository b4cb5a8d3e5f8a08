#include "lvq/reject.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lvq/dataset.hpp"

namespace lvq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kUnset = std::numeric_limits<int>::min();

int total_correct(const std::vector<CellRejectProfile>& profiles) {
  int n = 0;
  for (const auto& p : profiles) n += p.n_correct;
  return n;
}

// Largest false-reject count any index combination can realize.
int total_capacity(const std::vector<CellRejectProfile>& profiles) {
  int n = 0;
  for (const auto& p : profiles) n += p.max_index();
  return n;
}

void check_profiles(const std::vector<CellRejectProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no reject profiles");
  for (const auto& p : profiles) p.validate();
}

std::vector<double> thresholds_of(const std::vector<CellRejectProfile>& profiles,
                                  const std::vector<int>& indices) {
  std::vector<double> theta(profiles.size());
  for (std::size_t j = 0; j < profiles.size(); ++j)
    theta[j] = profiles[j].thresholds[static_cast<std::size_t>(indices[j])];
  return theta;
}

FrontEntry make_entry(const std::vector<CellRejectProfile>& profiles,
                      const std::vector<int>& indices) {
  FrontEntry e;
  e.indices = indices;
  e.thresholds = thresholds_of(profiles, indices);
  for (std::size_t j = 0; j < profiles.size(); ++j) {
    e.false_rejects += indices[j];
    e.true_rejects += profiles[j].true_rejects[static_cast<std::size_t>(indices[j])];
  }
  return e;
}

}  // namespace

void CellRejectProfile::validate() const {
  if (thresholds.empty()) throw std::invalid_argument("profile: no thresholds");
  if (thresholds.size() != true_rejects.size())
    throw std::invalid_argument("profile: thresholds/true_rejects size mismatch");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw std::invalid_argument("profile: thresholds must be ascending");
  if (!std::is_sorted(true_rejects.begin(), true_rejects.end()))
    throw std::invalid_argument("profile: true_rejects must be nondecreasing");
  if (n_correct < 0 || n_errors < 0)
    throw std::invalid_argument("profile: negative counts");
  if (true_rejects.back() > n_errors)
    throw std::invalid_argument("profile: true rejects exceed error count");
}

std::vector<CellRejectProfile> build_profiles(const std::vector<double>& scores,
                                              const std::vector<bool>& correct,
                                              const std::vector<std::size_t>& cells,
                                              std::size_t num_cells) {
  if (scores.size() != correct.size() || scores.size() != cells.size())
    throw std::invalid_argument("build_profiles: input size mismatch");
  if (num_cells == 0) throw std::invalid_argument("build_profiles: need at least one cell");
  for (std::size_t c : cells)
    if (c >= num_cells) throw std::invalid_argument("build_profiles: cell index out of range");

  struct Item {
    double score;
    bool correct;
    std::size_t idx;
  };
  std::vector<std::vector<Item>> by_cell(num_cells);
  for (std::size_t i = 0; i < scores.size(); ++i)
    by_cell[cells[i]].push_back({scores[i], correct[i], i});

  std::vector<CellRejectProfile> profiles(num_cells);
  for (std::size_t j = 0; j < num_cells; ++j) {
    CellRejectProfile& p = profiles[j];
    p.cell = j;
    auto& items = by_cell[j];
    if (items.empty()) {
      // Empty cell: one trivial threshold that rejects nothing.
      p.thresholds = {0.0};
      p.true_rejects = {0};
      continue;
    }
    // Ascending by score; on equal scores correct points first, then by
    // point index for determinism.
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      if (a.score != b.score) return a.score < b.score;
      if (a.correct != b.correct) return a.correct;
      return a.idx < b.idx;
    });
    int errors_seen = 0;
    for (const Item& it : items) {
      if (it.correct) {
        p.thresholds.push_back(it.score);
        p.true_rejects.push_back(errors_seen);
        ++p.n_correct;
      } else {
        ++errors_seen;
        ++p.n_errors;
      }
    }
    if (!items.back().correct) {
      // The most certain point of the cell is an error: the sentinel
      // threshold rejecting the whole cell is part of the candidate set.
      p.thresholds.push_back(kInf);
      p.true_rejects.push_back(p.n_errors);
    }
  }
  return profiles;
}

ThresholdFront global_front(const CellRejectProfile& profile) {
  profile.validate();
  ThresholdFront front;
  front.kind = FrontKind::pseudo;
  for (int i = 0; i <= profile.max_index(); ++i) {
    FrontEntry e;
    e.false_rejects = i;
    e.true_rejects = profile.true_rejects[static_cast<std::size_t>(i)];
    e.thresholds = {profile.thresholds[static_cast<std::size_t>(i)]};
    e.indices = {i};
    front.entries.push_back(std::move(e));
  }
  return front;
}

ThresholdFront dp_local_front(const std::vector<CellRejectProfile>& profiles) {
  check_profiles(profiles);
  const int xi = static_cast<int>(profiles.size());
  const int cap = total_capacity(profiles);
  const int n_max = std::min(cap, total_correct(profiles));

  // opt(n, j): max true rejects with exactly n false rejects, thresholds
  // free in cells 1..j and clamped to index 0 beyond; column 0 is the
  // virtual cell with a single threshold.
  const auto at = [xi](int n, int j) { return static_cast<std::size_t>(n * (xi + 1) + j); };
  std::vector<int> opt(static_cast<std::size_t>(n_max + 1) * (xi + 1), kUnset);
  int base = 0;
  for (const auto& p : profiles) base += p.true_rejects.front();
  for (int j = 0; j <= xi; ++j) opt[at(0, j)] = base;

  for (int n = 1; n <= n_max; ++n) {
    for (int j = 1; j <= xi; ++j) {
      const CellRejectProfile& p = profiles[static_cast<std::size_t>(j - 1)];
      int best = opt[at(n, j - 1)];
      const int imax = std::min(n, p.max_index());
      for (int i = 1; i <= imax; ++i) {
        const int prev = opt[at(n - i, j - 1)];
        if (prev == kUnset) continue;
        const int gain = p.true_rejects[static_cast<std::size_t>(i)] - p.true_rejects[0];
        if (prev + gain > best) best = prev + gain;
      }
      opt[at(n, j)] = best;
    }
  }

  ThresholdFront front;
  front.kind = FrontKind::pseudo;
  for (int n = 0; n <= n_max; ++n) {
    if (opt[at(n, xi)] == kUnset) break;  // beyond the realizable budget
    std::vector<int> indices(profiles.size(), 0);
    // Back-tracing: starting in the last cell, keep the largest feasible
    // threshold index that still attains the tabled optimum.
    int j = xi;
    int rem = n;
    int i = std::min(rem, profiles[static_cast<std::size_t>(j - 1)].max_index());
    while (j > 0) {
      const CellRejectProfile& p = profiles[static_cast<std::size_t>(j - 1)];
      if (i == 0) {
        --j;
        if (j > 0) i = std::min(rem, profiles[static_cast<std::size_t>(j - 1)].max_index());
        continue;
      }
      const int prev = opt[at(rem - i, j - 1)];
      const int gain = p.true_rejects[static_cast<std::size_t>(i)] - p.true_rejects[0];
      if (prev != kUnset && opt[at(rem, j)] == prev + gain) {
        indices[static_cast<std::size_t>(j - 1)] = i;
        rem -= i;
        --j;
        if (j > 0) i = std::min(rem, profiles[static_cast<std::size_t>(j - 1)].max_index());
      } else {
        --i;
      }
    }
    FrontEntry e = make_entry(profiles, indices);
    if (e.false_rejects != n || e.true_rejects != opt[at(n, xi)])
      throw std::logic_error("dp back-tracing failed to reproduce the optimum");
    front.entries.push_back(std::move(e));
  }
  return front;
}

ThresholdFront greedy_local_front(const std::vector<CellRejectProfile>& profiles) {
  check_profiles(profiles);
  const std::size_t xi = profiles.size();
  // For built profiles the last threshold of every cell rejects all of its
  // errors, so this equals |E|.
  int errors = 0;
  for (const auto& p : profiles) errors += p.true_rejects.back();

  std::vector<int> idx(xi, 0);
  int base = 0;
  for (const auto& p : profiles) base += p.true_rejects.front();
  int t = base;
  int n = 0;

  ThresholdFront front;
  front.kind = FrontKind::pseudo;
  front.entries.push_back(make_entry(profiles, idx));

  // Gain of raising cell j's threshold index by `step`; infeasible moves
  // rank below every feasible one.
  const auto gain_at = [&](std::size_t j, int step) -> long long {
    const CellRejectProfile& p = profiles[j];
    const int target = idx[j] + step;
    if (target > p.max_index()) return std::numeric_limits<long long>::min();
    return p.true_rejects[static_cast<std::size_t>(target)] -
           p.true_rejects[static_cast<std::size_t>(idx[j])];
  };

  while (t != errors) {
    long long gain = std::numeric_limits<long long>::min();
    std::size_t j_gain = 0;
    int ties = 0;
    for (std::size_t j = 0; j < xi; ++j) {
      const long long g = gain_at(j, 1);
      if (g > gain) {
        gain = g;
        j_gain = j;
        ties = 1;
      } else if (g == gain && g != std::numeric_limits<long long>::min()) {
        ++ties;
      }
    }

    // Best full reallocation: all n+1 false rejects spent in one cell.
    long long big_gain = std::numeric_limits<long long>::min();
    std::size_t j_big = 0;
    for (std::size_t j = 0; j < xi; ++j) {
      const CellRejectProfile& p = profiles[j];
      if (n + 1 > p.max_index()) continue;
      const long long g =
          p.true_rejects[static_cast<std::size_t>(n + 1)] - p.true_rejects[0];
      if (g > big_gain) {
        big_gain = g;
        j_big = j;
      }
    }

    if (big_gain != std::numeric_limits<long long>::min() &&
        big_gain > gain + (t - base)) {
      std::fill(idx.begin(), idx.end(), 0);
      ++n;
      idx[j_big] = n;
      t = static_cast<int>(big_gain) + base;
    } else if (ties == 1) {
      idx[j_gain] += 1;
      t += static_cast<int>(gain);
      n += 1;
    } else {
      // Tie: widen the lookahead until a single best cell remains, capped
      // at the largest remaining index; the smallest cell index wins at
      // the cap.
      int o_max = 0;
      for (std::size_t j = 0; j < xi; ++j)
        o_max = std::max(o_max, profiles[j].max_index() - idx[j]);
      int o = 1;
      while (ties != 1 && o < o_max) {
        ++o;
        gain = std::numeric_limits<long long>::min();
        ties = 0;
        for (std::size_t j = 0; j < xi; ++j) {
          const long long g = gain_at(j, o);
          if (g > gain) {
            gain = g;
            j_gain = j;
            ties = 1;
          } else if (g == gain && g != std::numeric_limits<long long>::min()) {
            ++ties;
          }
        }
      }
      idx[j_gain] += o;
      t += static_cast<int>(gain);
      n += o;
    }
    front.entries.push_back(make_entry(profiles, idx));
  }
  return front;
}

ThresholdFront brute_force_front(const std::vector<CellRejectProfile>& profiles,
                                 std::uint64_t cap) {
  check_profiles(profiles);
  std::uint64_t combos = 1;
  for (const auto& p : profiles) {
    const auto sz = static_cast<std::uint64_t>(p.thresholds.size());
    if (combos > cap / sz)
      throw std::runtime_error("brute_force_front: combination count exceeds cap");
    combos *= sz;
  }

  const int n_cap = total_capacity(profiles);
  std::vector<int> best(static_cast<std::size_t>(n_cap) + 1, kUnset);
  std::vector<std::vector<int>> best_idx(static_cast<std::size_t>(n_cap) + 1);

  std::vector<int> idx(profiles.size(), 0);
  int n = 0;
  int t = 0;
  for (const auto& p : profiles) t += p.true_rejects.front();
  for (;;) {
    if (best[static_cast<std::size_t>(n)] < t) {
      best[static_cast<std::size_t>(n)] = t;
      best_idx[static_cast<std::size_t>(n)] = idx;
    }
    // Odometer step over the index combinations.
    std::size_t j = 0;
    for (; j < profiles.size(); ++j) {
      const CellRejectProfile& p = profiles[j];
      if (idx[j] < p.max_index()) {
        n += 1;
        t += p.true_rejects[static_cast<std::size_t>(idx[j] + 1)] -
             p.true_rejects[static_cast<std::size_t>(idx[j])];
        idx[j] += 1;
        break;
      }
      n -= idx[j];
      t -= p.true_rejects[static_cast<std::size_t>(idx[j])] - p.true_rejects[0];
      idx[j] = 0;
    }
    if (j == profiles.size()) break;
  }

  ThresholdFront front;
  front.kind = FrontKind::pseudo;
  for (int k = 0; k <= n_cap; ++k) {
    if (best[static_cast<std::size_t>(k)] == kUnset) continue;
    front.entries.push_back(make_entry(profiles, best_idx[static_cast<std::size_t>(k)]));
  }
  return front;
}

RejectSplit apply_thresholds(const std::vector<double>& scores,
                             const std::vector<std::size_t>& cells,
                             const std::vector<double>& thresholds) {
  if (scores.size() != cells.size())
    throw std::invalid_argument("apply_thresholds: input size mismatch");
  RejectSplit split;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (cells[i] >= thresholds.size())
      throw std::invalid_argument("apply_thresholds: cell index out of range");
    if (scores[i] < thresholds[cells[i]])
      split.rejected.push_back(i);
    else
      split.accepted.push_back(i);
  }
  return split;
}

std::pair<int, int> count_rejects(const std::vector<double>& scores,
                                  const std::vector<bool>& correct,
                                  const std::vector<std::size_t>& cells,
                                  const std::vector<double>& thresholds) {
  const RejectSplit split = apply_thresholds(scores, cells, thresholds);
  int false_rejects = 0, true_rejects = 0;
  for (std::size_t i : split.rejected) {
    if (correct[i]) ++false_rejects;
    else ++true_rejects;
  }
  return {false_rejects, true_rejects};
}

void save_front_csv(const ThresholdFront& front, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write front file: " + path);
  const std::size_t xi = front.entries.empty() ? 0 : front.entries[0].thresholds.size();
  out << "n_false,n_true";
  for (std::size_t j = 1; j <= xi; ++j) out << ",theta_" << j;
  out << '\n';
  for (const auto& e : front.entries) {
    out << e.false_rejects << ',' << e.true_rejects;
    for (double v : e.thresholds)
      out << ',' << (std::isinf(v) ? std::string("inf") : format_double(v));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

RejectInstance random_reject_instance(std::mt19937_64& rng, std::size_t max_cells,
                                      std::size_t max_points) {
  if (max_cells == 0 || max_points == 0)
    throw std::invalid_argument("random_reject_instance: empty size bounds");
  RejectInstance inst;
  inst.num_cells = std::uniform_int_distribution<std::size_t>(1, max_cells)(rng);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_points)(rng);
  const double p_correct = std::uniform_real_distribution<double>(0.3, 0.9)(rng);
  std::uniform_int_distribution<std::size_t> cell_dist(0, inst.num_cells - 1);
  std::uniform_real_distribution<double> score_dist(0.0, 1.0);
  std::bernoulli_distribution correct_dist(p_correct);
  for (std::size_t i = 0; i < n; ++i) {
    inst.cells.push_back(cell_dist(rng));
    inst.scores.push_back(score_dist(rng));
    inst.correct.push_back(correct_dist(rng));
  }
  return inst;
}

}  // namespace lvq
