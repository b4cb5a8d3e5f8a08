#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lvq/datagen.hpp"
#include "lvq/evaluation.hpp"
#include "lvq/svg.hpp"

namespace fs = std::filesystem;

namespace lvq::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const char* kUsage = R"(usage: lvqreject <command> [flags]

commands:
  gen     generate a synthetic dataset and its mixture sidecar
          --kind {gaussian-clusters,pearl-necklace} --out FILE
          [--points N] [--noise F] [--seed S] [--force]
  train   train a prototype classifier and save the model file
          --data FILE --model {glvq,gmlvq,lgmlvq,rslvq} --out FILE
          [--ppc K] [--epochs E] [--lr X] [--lr-metric X]
          [--phi {identity,logistic}] [--sigma S] [--seed S]
          [--trace FILE] [--scores-out FILE]
  arc     cross-validated accuracy-reject curves
          --data FILE --model KIND --measure {relsim,conf,bayes}
          --reject global,local-dp,local-greedy --out DIR
          [--folds N] [--repeats N] [--seed S] [--svg] [--bayes-ref]
          [--grid-step X] [--min-support N] [train flags]
  verify  check the exact threshold optimizer against the oracle
          [--trials N] [--max-cells N] [--max-points N] [--seed S]
          [--oracle-cap N]
)";

struct Flags {
  std::map<std::string, std::string> values;
  std::set<std::string> switches;
  std::set<std::string> consumed;

  bool has(const std::string& name) const {
    return values.count(name) || switches.count(name);
  }
  std::string get(const std::string& name, const std::string& fallback) {
    consumed.insert(name);
    auto it = values.find(name);
    return it == values.end() ? fallback : it->second;
  }
  std::string require(const std::string& name) {
    consumed.insert(name);
    auto it = values.find(name);
    if (it == values.end()) throw UsageError("missing required flag --" + name);
    return it->second;
  }
  bool flag(const std::string& name) {
    consumed.insert(name);
    return switches.count(name) > 0;
  }
  void reject_unknown() const {
    for (const auto& [k, v] : values)
      if (!consumed.count(k)) throw UsageError("unknown flag --" + k);
    for (const auto& k : switches)
      if (!consumed.count(k)) throw UsageError("unknown flag --" + k);
  }
};

Flags parse_flags(const std::vector<std::string>& args, std::size_t start,
                  const std::set<std::string>& boolean_flags) {
  Flags flags;
  for (std::size_t i = start; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) throw UsageError("expected a flag, got '" + a + "'");
    const std::string name = a.substr(2);
    if (boolean_flags.count(name)) {
      flags.switches.insert(name);
      continue;
    }
    if (i + 1 >= args.size()) throw UsageError("flag --" + name + " needs a value");
    flags.values[name] = args[++i];
  }
  return flags;
}

long parse_int(const std::string& name, const std::string& s) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("flag --" + name + ": expected an integer, got '" + s + "'");
  }
}

double parse_real(const std::string& name, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw UsageError("flag --" + name + ": expected a number, got '" + s + "'");
  }
}

ModelKind parse_model(const std::string& s) {
  if (s == "glvq") return ModelKind::glvq;
  if (s == "gmlvq") return ModelKind::gmlvq;
  if (s == "lgmlvq") return ModelKind::lgmlvq;
  if (s == "rslvq") return ModelKind::rslvq;
  throw UsageError("unknown model '" + s + "'");
}

CertaintyMeasure parse_measure(const std::string& s) {
  if (s == "relsim") return CertaintyMeasure::relsim;
  if (s == "conf") return CertaintyMeasure::conf;
  if (s == "bayes") return CertaintyMeasure::bayes_oracle;
  throw UsageError("unknown measure '" + s + "'");
}

RejectScheme parse_scheme(const std::string& s) {
  if (s == "global") return RejectScheme::global;
  if (s == "local-dp") return RejectScheme::local_dp;
  if (s == "local-greedy") return RejectScheme::local_greedy;
  throw UsageError("unknown reject scheme '" + s + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

TrainConfig train_config_from(Flags& flags) {
  TrainConfig cfg;
  cfg.prototypes_per_class = static_cast<int>(parse_int("ppc", flags.get("ppc", "1")));
  cfg.epochs = static_cast<int>(parse_int("epochs", flags.get("epochs", "100")));
  cfg.lr_prototypes = parse_real("lr", flags.get("lr", "0.05"));
  cfg.lr_metric = parse_real("lr-metric", flags.get("lr-metric", "0.05"));
  cfg.sigma = parse_real("sigma", flags.get("sigma", "1"));
  cfg.seed = static_cast<std::uint64_t>(parse_int("seed", flags.get("seed", "1")));
  const std::string phi = flags.get("phi", "identity");
  if (phi == "identity") cfg.phi = Phi::identity;
  else if (phi == "logistic") cfg.phi = Phi::logistic;
  else throw UsageError("unknown phi '" + phi + "'");
  return cfg;
}

fs::path sidecar_path(const fs::path& dataset) {
  fs::path p = dataset;
  p.replace_extension(".mixture");
  return p;
}

int cmd_gen(Flags& flags, std::ostream& out) {
  SyntheticSpec spec;
  const std::string kind = flags.require("kind");
  if (kind == "gaussian-clusters") spec.kind = SyntheticKind::gaussian_clusters;
  else if (kind == "pearl-necklace") spec.kind = SyntheticKind::pearl_necklace;
  else throw UsageError("unknown kind '" + kind + "'");
  spec.points_per_cluster = static_cast<int>(parse_int("points", flags.get("points", "500")));
  spec.noise_fraction = parse_real("noise", flags.get("noise", "0.05"));
  if (spec.kind == SyntheticKind::pearl_necklace) spec.noise_fraction = 0.0;
  spec.seed = static_cast<std::uint64_t>(parse_int("seed", flags.get("seed", "1")));
  const fs::path out_path = flags.require("out");
  const bool force = flags.flag("force");
  flags.reject_unknown();

  const fs::path mix_path = sidecar_path(out_path);
  if (!force && (fs::exists(out_path) || fs::exists(mix_path)))
    throw std::invalid_argument("output exists; pass --force to overwrite");

  const SyntheticData gen = generate(spec);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  save_dataset_csv(gen.data, out_path.string());
  save_mixture(gen.mixture, mix_path.string());
  out << "wrote " << gen.data.size() << " points to " << out_path.string() << '\n';
  out << "wrote mixture sidecar to " << mix_path.string() << '\n';
  return kExitOk;
}

int cmd_train(Flags& flags, std::ostream& out) {
  const std::string data_path = flags.require("data");
  const ModelKind kind = parse_model(flags.require("model"));
  const std::string out_path = flags.require("out");
  const std::string trace_path = flags.get("trace", "");
  const std::string scores_path = flags.get("scores-out", "");
  TrainConfig cfg = train_config_from(flags);
  flags.reject_unknown();
  cfg.validate();

  const LabeledDataset data = load_dataset_csv(data_path);
  const TrainResult result = train_model(kind, data, cfg);
  if (fs::path(out_path).has_parent_path())
    fs::create_directories(fs::path(out_path).parent_path());
  save_model(result.model, out_path);

  out << "model " << model_kind_name(kind) << ": " << result.model.num_prototypes()
      << " prototypes, dim " << result.model.dim << '\n';
  out << "final cost " << format_double(result.report.cost_trace.back())
      << ", train accuracy " << format_double(result.report.final_train_accuracy) << '\n';
  out << "wrote model to " << out_path << '\n';

  if (!trace_path.empty()) {
    std::ofstream tr(trace_path);
    if (!tr) throw std::runtime_error("cannot write trace file: " + trace_path);
    tr << "epoch,cost\n";
    for (std::size_t e = 0; e < result.report.cost_trace.size(); ++e)
      tr << e + 1 << ',' << format_double(result.report.cost_trace[e]) << '\n';
  }
  if (!scores_path.empty()) {
    const CertaintyMeasure measure =
        kind == ModelKind::rslvq ? CertaintyMeasure::conf : CertaintyMeasure::relsim;
    const auto scores = certainty_scores(measure, &result.model, nullptr, data);
    std::ofstream sc(scores_path);
    if (!sc) throw std::runtime_error("cannot write scores file: " + scores_path);
    for (std::size_t d = 1; d <= data.dim; ++d) sc << 'f' << d << ',';
    sc << "label,score\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t d = 0; d < data.dim; ++d) {
        if (!is_missing(data.points[i][d])) sc << format_double(data.points[i][d]);
        sc << ',';
      }
      sc << data.labels[i] << ',' << format_double(scores[i]) << '\n';
    }
  }
  return kExitOk;
}

int cmd_arc(Flags& flags, std::ostream& out) {
  const std::string data_path = flags.require("data");
  const ModelKind kind = parse_model(flags.require("model"));
  const CertaintyMeasure measure = parse_measure(flags.require("measure"));
  const auto scheme_names = split_list(flags.require("reject"));
  if (scheme_names.empty()) throw UsageError("--reject needs at least one scheme");
  std::vector<RejectScheme> schemes;
  for (const auto& s : scheme_names) schemes.push_back(parse_scheme(s));
  const fs::path out_dir = flags.require("out");
  const int folds = static_cast<int>(parse_int("folds", flags.get("folds", "10")));
  const int repeats = static_cast<int>(parse_int("repeats", flags.get("repeats", "10")));
  const double grid_step = parse_real("grid-step", flags.get("grid-step", "0.01"));
  const int min_support =
      static_cast<int>(parse_int("min-support", flags.get("min-support", "80")));
  const bool svg = flags.flag("svg");
  const bool bayes_ref = flags.flag("bayes-ref");
  TrainConfig cfg = train_config_from(flags);
  const std::uint64_t seed = cfg.seed;
  flags.reject_unknown();
  cfg.validate();

  // Validate the measure/model combination before any training happens.
  if (measure == CertaintyMeasure::conf && kind != ModelKind::rslvq)
    throw std::invalid_argument("the conf measure requires --model rslvq");
  GenerativeMixture mixture;
  bool have_mixture = false;
  const fs::path mix_path = sidecar_path(data_path);
  if (fs::exists(mix_path)) {
    mixture = load_mixture(mix_path.string());
    have_mixture = true;
  }
  if (measure == CertaintyMeasure::bayes_oracle && !have_mixture)
    throw std::invalid_argument("the bayes measure needs the mixture sidecar " +
                                mix_path.string());
  if (bayes_ref && !have_mixture)
    throw std::invalid_argument("--bayes-ref needs the mixture sidecar " +
                                mix_path.string());

  const LabeledDataset data = load_dataset_csv(data_path);
  fs::create_directories(out_dir);

  if (min_support > folds * repeats)
    out << "note: --min-support " << min_support << " exceeds the " << folds * repeats
        << " cross-validation runs; no grid point can qualify\n";

  std::vector<AveragedARC> all;
  for (RejectScheme scheme : schemes) {
    const auto curves = cross_validate(data, kind, measure, scheme, folds, repeats, seed,
                                       cfg, have_mixture ? &mixture : nullptr);
    const AveragedARC avg = average_arcs(curves, grid_step, min_support);
    const fs::path csv = out_dir / (std::string("arc_") + reject_scheme_name(scheme) + ".csv");
    save_arc_csv({avg}, csv.string());
    out << "wrote " << csv.string() << " (" << curves.size() << " runs, " << avg.grid.size()
        << " grid points)\n";
    all.push_back(avg);
  }
  if (bayes_ref) {
    const auto curves = bayes_reference_curves(data, mixture, folds, repeats, seed);
    const AveragedARC avg = average_arcs(curves, grid_step, min_support);
    const fs::path csv = out_dir / "arc_bayes.csv";
    save_arc_csv({avg}, csv.string());
    out << "wrote " << csv.string() << '\n';
    all.push_back(avg);
  }
  if (svg) {
    const fs::path plot = out_dir / "arc.svg";
    write_arc_svg(all, plot.string());
    out << "wrote " << plot.string() << '\n';
  }
  return kExitOk;
}

// The worked three-cell example: cumulative true rejects per threshold index.
std::vector<CellRejectProfile> fixture_profiles() {
  std::vector<CellRejectProfile> profiles(3);
  const std::vector<std::vector<int>> rejects = {{3, 4, 6, 9}, {2, 3, 6}, {1, 2, 10, 20}};
  for (std::size_t j = 0; j < 3; ++j) {
    profiles[j].cell = j;
    profiles[j].true_rejects = rejects[j];
    for (std::size_t i = 0; i < rejects[j].size(); ++i)
      profiles[j].thresholds.push_back(0.1 * static_cast<double>(i + 1));
    profiles[j].n_correct = static_cast<int>(rejects[j].size());
    profiles[j].n_errors = rejects[j].back();
  }
  return profiles;
}

int cmd_verify(Flags& flags, std::ostream& out) {
  const int trials = static_cast<int>(parse_int("trials", flags.get("trials", "200")));
  const auto max_cells =
      static_cast<std::size_t>(parse_int("max-cells", flags.get("max-cells", "4")));
  const auto max_points =
      static_cast<std::size_t>(parse_int("max-points", flags.get("max-points", "40")));
  const auto seed = static_cast<std::uint64_t>(parse_int("seed", flags.get("seed", "1")));
  const auto cap =
      static_cast<std::uint64_t>(parse_int("oracle-cap", flags.get("oracle-cap", "10000000")));
  flags.reject_unknown();
  if (trials < 1) throw std::invalid_argument("--trials must be >= 1");

  int failures = 0;
  const auto report = [&](bool ok, const std::string& what) {
    out << (ok ? "[ok]   " : "[FAIL] ") << what << '\n';
    if (!ok) ++failures;
  };

  // Fixed three-cell example first.
  const auto fixture = fixture_profiles();
  const ThresholdFront greedy = greedy_local_front(fixture);
  const std::vector<std::pair<int, int>> expected_trace = {
      {0, 6}, {2, 15}, {3, 25}, {5, 29}, {6, 30}, {7, 32}, {8, 35}};
  std::vector<std::pair<int, int>> got;
  for (const auto& e : greedy.entries) got.emplace_back(e.false_rejects, e.true_rejects);
  report(got == expected_trace, "greedy trace on the worked example");

  const ThresholdFront dp = dp_local_front(fixture);
  const ThresholdFront oracle = brute_force_front(fixture, cap);
  bool dp_matches = dp.entries.size() == oracle.entries.size();
  for (std::size_t i = 0; dp_matches && i < dp.entries.size(); ++i)
    dp_matches = dp.entries[i].false_rejects == oracle.entries[i].false_rejects &&
                 dp.entries[i].true_rejects == oracle.entries[i].true_rejects;
  report(dp_matches, "dp equals the exhaustive oracle on the worked example");
  report(dp.entries[3].true_rejects == 25 && dp.entries[3].indices == std::vector<int>{0, 0, 3},
         "dp picks 25 true rejects at 3 false rejects via (0,0,3)");
  report(dp.entries[6].true_rejects == 31, "dp reaches 31 true rejects at 6 false rejects");
  report(greedy.entries[4].true_rejects == 30 && dp.entries[6].true_rejects == 31,
         "dp beats greedy at 6 false rejects (31 vs 30)");

  // Random instances: dp == oracle for every false-reject count, greedy
  // never above dp, thresholds reproduce their counts.
  std::mt19937_64 rng(seed);
  bool all_equal = true, greedy_bounded = true, reconstruct = true;
  for (int t = 0; t < trials; ++t) {
    const RejectInstance inst = random_reject_instance(rng, max_cells, max_points);
    const auto profiles =
        build_profiles(inst.scores, inst.correct, inst.cells, inst.num_cells);
    const ThresholdFront a = dp_local_front(profiles);
    const ThresholdFront b = brute_force_front(profiles, cap);
    if (a.entries.size() != b.entries.size()) all_equal = false;
    for (std::size_t i = 0; i < std::min(a.entries.size(), b.entries.size()); ++i)
      if (a.entries[i].false_rejects != b.entries[i].false_rejects ||
          a.entries[i].true_rejects != b.entries[i].true_rejects)
        all_equal = false;
    const ThresholdFront g = greedy_local_front(profiles);
    for (const auto& e : g.entries) {
      const auto n = static_cast<std::size_t>(e.false_rejects);
      if (n >= a.entries.size() || a.entries[n].false_rejects != e.false_rejects ||
          e.true_rejects > a.entries[n].true_rejects)
        greedy_bounded = false;
    }
    for (const auto* front : {&a, &g}) {
      for (const auto& e : front->entries) {
        const auto [nf, nt] =
            count_rejects(inst.scores, inst.correct, inst.cells, e.thresholds);
        if (nf != e.false_rejects || nt != e.true_rejects) reconstruct = false;
      }
    }
  }
  report(all_equal, "dp equals the exhaustive oracle on " + std::to_string(trials) +
                        " random instances");
  report(greedy_bounded, "greedy never exceeds dp at any visited budget");
  report(reconstruct, "threshold vectors reproduce their reject counts exactly");

  out << (failures == 0 ? "verify: all checks passed\n"
                        : "verify: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.empty()) throw UsageError("missing command");
    const std::string& cmd = args[0];
    static const std::set<std::string> kSwitches = {"force", "svg", "bayes-ref"};
    Flags flags = parse_flags(args, 1, kSwitches);
    if (cmd == "gen") return cmd_gen(flags, out);
    if (cmd == "train") return cmd_train(flags, out);
    if (cmd == "arc") return cmd_arc(flags, out);
    if (cmd == "verify") return cmd_verify(flags, out);
    if (cmd == "help" || cmd == "--help" || cmd == "-h") {
      out << kUsage;
      return kExitOk;
    }
    throw UsageError("unknown command '" + cmd + "'");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << kUsage;
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace lvq::cli
