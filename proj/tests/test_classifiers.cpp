#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lvq/classifiers.hpp"
#include "lvq/datagen.hpp"
#include "testutil.hpp"

using namespace lvq;
using lvqtest::relative_error;

using lvqtest::attach_rslvq;
using lvqtest::worst_glvq_gradient_error;
using lvqtest::worst_rslvq_gradient_error;

namespace {

LabeledDataset two_separated_clusters_1d(std::mt19937_64& rng, std::size_t per_class) {
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<Vec> points;
  std::vector<int> labels;
  for (std::size_t i = 0; i < per_class; ++i) {
    points.push_back({noise(rng)});
    labels.push_back(1);
    points.push_back({100.0 + noise(rng)});
    labels.push_back(2);
  }
  return make_dataset(std::move(points), std::move(labels));
}

bool all_finite(const PrototypeModel& m) {
  for (const auto& w : m.prototypes)
    for (double v : w)
      if (!std::isfinite(v)) return false;
  for (const auto& om : m.omegas)
    for (double v : om.data)
      if (!std::isfinite(v)) return false;
  return true;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("classifiers");

TEST_CASE("margin cost: equal distances give a zero summand") {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{0.0}, {10.0}};
  m.proto_labels = {1, 2};
  const auto data = make_dataset({{5.0}}, {1});  // d+ = d- = 25
  CHECK(glvq_cost(m, data) == doctest::Approx(0.0));
}

TEST_CASE("margin cost: d+ = 1, d- = 3 contributes -0.5") {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{0.0}, {1.0 + std::sqrt(3.0)}};
  m.proto_labels = {1, 2};
  const auto data = make_dataset({{1.0}}, {1});
  CHECK(glvq_cost(m, data) == doctest::Approx(-0.5));
}

TEST_CASE("margin cost: summand negative exactly when the point is correct") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 40; ++t) {
    auto m = lvqtest::random_model(rng, 2, 3, 2, MetricKind::euclidean);
    const auto data = lvqtest::random_labeled_data(rng, m, 1);
    const double c = glvq_cost(m, data);
    const bool correct = classify(m, data.points[0], data.labels[0]).correct;
    if (c < 0.0) CHECK(correct);
    if (c > 0.0) CHECK(!correct);
  }
}

TEST_CASE("margin cost: summands stay in (-1, 0] inside the winning cell") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    auto m = lvqtest::random_model(rng, 2, 3, 1, MetricKind::euclidean);
    const Vec x = {coord(rng), coord(rng)};
    // Label the point by its winner, so that prototype carries d+.
    const auto data = make_dataset({x}, {classify(m, x).predicted});
    const double c = glvq_cost(m, data);
    CHECK(c <= 0.0);
    CHECK(c > -1.0);
  }
}

TEST_CASE("margin cost requires a competing class") {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{0.0}};
  m.proto_labels = {1};
  const auto data = make_dataset({{1.0}}, {1});
  CHECK_THROWS_AS(glvq_cost(m, data), std::invalid_argument);
}

TEST_CASE("gradients of the margin cost match finite differences") {
  std::mt19937_64 rng(107);
  int done = 0;
  while (done < 24) {
    const MetricKind metric = done % 3 == 0   ? MetricKind::euclidean
                              : done % 3 == 1 ? MetricKind::global_matrix
                                              : MetricKind::local_matrices;
    const Phi phi = done % 2 == 0 ? Phi::identity : Phi::logistic;
    auto m = lvqtest::random_model(rng, 3, 2, 2, metric);
    const auto data = lvqtest::random_labeled_data(rng, m, 6);
    if (lvqtest::has_close_competitors(m, data, 1e-2)) continue;
    CHECK(worst_glvq_gradient_error(m, data, phi) < 1e-5);
    ++done;
  }
}

TEST_CASE("margin-cost gradient honors missing dimensions") {
  std::mt19937_64 rng(109);
  int done = 0;
  while (done < 4) {
    auto m = lvqtest::random_model(rng, 3, 2, 1, MetricKind::global_matrix);
    auto data = lvqtest::random_labeled_data(rng, m, 5);
    data.points[0][1] = missing_value();
    data.points[2][0] = missing_value();
    if (lvqtest::has_close_competitors(m, data, 1e-2)) continue;
    CHECK(worst_glvq_gradient_error(m, data, Phi::identity) < 1e-5);
    ++done;
  }
}

TEST_CASE("rslvq log-likelihood gradient matches finite differences") {
  std::mt19937_64 rng(113);
  for (int t = 0; t < 20; ++t) {
    auto m = lvqtest::random_model(rng, 2, 3, 2, MetricKind::euclidean);
    attach_rslvq(m, 1.5);
    const auto data = lvqtest::random_labeled_data(rng, m, 6);
    CHECK(worst_rslvq_gradient_error(m, data) < 1e-5);
  }
}

TEST_CASE("posterior: sums to one and matches the naive density ratio") {
  std::mt19937_64 rng(127);
  for (int t = 0; t < 30; ++t) {
    auto m = lvqtest::random_model(rng, 2, 3, 2, MetricKind::euclidean);
    attach_rslvq(m, 1.2);
    const auto data = lvqtest::random_labeled_data(rng, m, 1);
    const auto post = posterior(m, data.points[0]);
    double sum = 0.0;
    for (double p : post) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);

    // Naive arithmetic, no log-space: densities are benign at this scale.
    std::vector<double> direct(3, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < m.num_prototypes(); ++j) {
      const double s2 = m.rslvq->sigma[j] * m.rslvq->sigma[j];
      const double dens = std::exp(-distance(m, j, data.points[0]) / (2 * s2)) /
                          (2 * M_PI * s2);
      direct[m.proto_labels[j] - 1] += m.rslvq->priors[j] * dens;
      total += m.rslvq->priors[j] * dens;
    }
    for (int z = 0; z < 3; ++z)
      CHECK(post[z] == doctest::Approx(direct[z] / total).epsilon(1e-9));
  }
}

TEST_CASE("posterior: an equidistant point gets the uniform vector") {
  PrototypeModel m;
  m.dim = 2;
  m.prototypes = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
  m.proto_labels = {1, 2, 3};
  attach_rslvq(m, 1.0);
  // The origin is at distance 1 from all three prototypes.
  for (double p : posterior(m, Vec{0.0, 0.0})) CHECK(p == doctest::Approx(1.0 / 3));
}

TEST_CASE("posterior: small bandwidth concentrates on the nearest prototype") {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{0.0}, {1.0}};
  m.proto_labels = {1, 2};
  attach_rslvq(m, 0.05);
  CHECK(posterior(m, Vec{0.0})[0] == doctest::Approx(1.0));
  CHECK(conf(m, Vec{0.0}) == doctest::Approx(1.0));
}

TEST_CASE("rslvq likelihood ratio: single class is exactly zero") {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{0.0}, {2.0}};
  m.proto_labels = {1, 1};
  attach_rslvq(m, 1.0);
  const auto data = make_dataset({{0.5}, {1.5}, {-3.0}}, {1, 1, 1});
  CHECK(rslvq_log_likelihood_ratio(m, data) == 0.0);
}

TEST_CASE("rslvq likelihood ratio: separable data approaches zero from below") {
  std::mt19937_64 rng(131);
  const auto data = two_separated_clusters_1d(rng, 20);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.sigma = 0.5;
  const auto result = train_rslvq(data, cfg);
  CHECK(result.report.cost_trace.back() <= 0.0);
  CHECK(result.report.cost_trace.back() > -1e-8);
  CHECK(result.report.final_train_accuracy == 1.0);
}

TEST_CASE("training: separable clusters are learned perfectly") {
  std::mt19937_64 rng(137);
  const auto data = two_separated_clusters_1d(rng, 25);
  TrainConfig cfg;
  cfg.epochs = 30;
  for (auto train : {train_glvq, train_gmlvq, train_lgmlvq}) {
    const auto result = train(data, cfg);
    CHECK(result.report.final_train_accuracy == 1.0);
    CHECK(result.report.cost_trace.size() == 30);
  }
}

TEST_CASE("training: epoch bounds") {
  std::mt19937_64 rng(139);
  const auto data = two_separated_clusters_1d(rng, 10);
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK(train_glvq(data, cfg).report.cost_trace.size() == 1);
  cfg.epochs = 0;
  CHECK_THROWS_AS(train_glvq(data, cfg), std::invalid_argument);
}

TEST_CASE("training: degenerate and messy data never produce non-finite parameters") {
  // All points identical.
  const auto degenerate = make_dataset({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}},
                                       {1, 2, 1, 2});
  TrainConfig cfg;
  cfg.epochs = 10;
  for (auto train : {train_glvq, train_gmlvq, train_lgmlvq, train_rslvq}) {
    const auto result = train(degenerate, cfg);
    CHECK(all_finite(result.model));
  }

  std::mt19937_64 rng(149);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_int_distribution<int> label(1, 3);
  std::vector<Vec> pts;
  std::vector<int> labels = {1, 2, 3};  // ensure presence
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 1.0});
  pts.push_back({-1.0, 1.0});
  for (int i = 0; i < 47; ++i) {
    Vec x = {coord(rng), coord(rng)};
    if (i % 7 == 0) x[i % 2] = missing_value();
    pts.push_back(std::move(x));
    labels.push_back(label(rng));
  }
  const auto messy = make_dataset(std::move(pts), std::move(labels));
  cfg.epochs = 15;
  for (auto train : {train_glvq, train_gmlvq, train_lgmlvq, train_rslvq}) {
    const auto result = train(messy, cfg);
    CHECK(all_finite(result.model));
    for (double c : result.report.cost_trace) CHECK(std::isfinite(c));
  }
}

TEST_CASE("training: identical seeds give byte-identical models") {
  std::mt19937_64 rng(151);
  const auto data = two_separated_clusters_1d(rng, 15);
  TrainConfig cfg;
  cfg.epochs = 12;
  cfg.seed = 99;
  const auto a = train_gmlvq(data, cfg);
  const auto b = train_gmlvq(data, cfg);
  save_model(a.model, "/tmp/lvq_test_seed_a.txt");
  save_model(b.model, "/tmp/lvq_test_seed_b.txt");
  CHECK(slurp("/tmp/lvq_test_seed_a.txt") == slurp("/tmp/lvq_test_seed_b.txt"));
}

TEST_CASE("pearl necklace: the local metric beats the global one on average") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::pearl_necklace;
  spec.points_per_cluster = 200;
  double gm = 0.0, lgm = 0.0;
  TrainConfig cfg;
  cfg.epochs = 80;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto gen = gen_pearl_necklace(spec);
    cfg.seed = seed;
    gm += train_gmlvq(gen.data, cfg).report.final_train_accuracy;
    lgm += train_lgmlvq(gen.data, cfg).report.final_train_accuracy;
  }
  CHECK(gm / 10 < lgm / 10);
}

TEST_CASE("gaussian clusters: rslvq tracks gmlvq accuracy") {
  SyntheticSpec spec;
  spec.kind = SyntheticKind::gaussian_clusters;
  spec.points_per_cluster = 250;
  double gm = 0.0, rs = 0.0;
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.sigma = 3.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    spec.seed = seed;
    const auto gen = gen_gaussian_clusters(spec);
    cfg.seed = seed;
    gm += train_gmlvq(gen.data, cfg).report.final_train_accuracy;
    rs += train_rslvq(gen.data, cfg).report.final_train_accuracy;
  }
  CHECK(std::abs(gm / 10 - rs / 10) < 0.05);
}

TEST_CASE("config validation") {
  TrainConfig cfg;
  cfg.sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.lr_prototypes = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
