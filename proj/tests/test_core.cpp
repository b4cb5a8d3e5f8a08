#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lvq/dataset.hpp"
#include "lvq/model.hpp"
#include "testutil.hpp"

using namespace lvq;

namespace {

PrototypeModel euclid_model(std::vector<Vec> protos, std::vector<int> labels) {
  PrototypeModel m;
  m.dim = protos.front().size();
  m.prototypes = std::move(protos);
  m.proto_labels = std::move(labels);
  return m;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("distance: zero at the prototype, squared norm otherwise") {
  auto m = euclid_model({{1.0, -2.0}}, {1});
  CHECK(distance(m, 0, Vec{1.0, -2.0}) == 0.0);
  CHECK(distance(m, 0, Vec{4.0, 2.0}) == doctest::Approx(25.0));  // diff (3, 4)
}

TEST_CASE("distance: zero difference under any PSD matrix") {
  std::mt19937_64 rng(3);
  auto m = lvqtest::random_model(rng, 3, 2, 1, MetricKind::local_matrices);
  for (std::size_t j = 0; j < m.num_prototypes(); ++j)
    CHECK(distance(m, j, m.prototypes[j]) == doctest::Approx(0.0));
}

TEST_CASE("distance: missing dimensions drop out of the sum") {
  auto m = euclid_model({{0.0, 7.0}}, {1});
  CHECK(distance(m, 0, Vec{3.0, missing_value()}) == doctest::Approx(9.0));

  // Same through a matrix metric: equals the quadratic form restricted to
  // the present block.
  PrototypeModel g = m;
  g.metric = MetricKind::global_matrix;
  Matrix om(2, 2);
  om(0, 0) = 1.2; om(0, 1) = 0.3; om(1, 0) = -0.5; om(1, 1) = 0.8;
  g.omegas = {om};
  const Matrix lam = g.lambda(0);
  CHECK(distance(g, 0, Vec{3.0, missing_value()}) == doctest::Approx(9.0 * lam(0, 0)));
}

TEST_CASE("distance: missing-aware equals plain on complete vectors") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  auto m = lvqtest::random_model(rng, 4, 3, 1, MetricKind::global_matrix);
  const Matrix lam = m.lambda(0);
  for (int t = 0; t < 30; ++t) {
    Vec x(4);
    for (auto& v : x) v = coord(rng);
    for (std::size_t j = 0; j < m.num_prototypes(); ++j) {
      double want = 0.0;
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
          want += (x[a] - m.prototypes[j][a]) * lam(a, b) * (x[b] - m.prototypes[j][b]);
      CHECK(distance(m, j, x) == doctest::Approx(want));
    }
  }
}

TEST_CASE("distance: dimension mismatch is rejected") {
  auto m = euclid_model({{0.0, 0.0}}, {1});
  CHECK_THROWS_AS(distance(m, 0, Vec{1.0}), std::invalid_argument);
}

TEST_CASE("lambda is symmetric positive semi-definite by construction") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  auto m = lvqtest::random_model(rng, 3, 2, 2, MetricKind::local_matrices);
  for (std::size_t j = 0; j < m.num_prototypes(); ++j) {
    const Matrix lam = m.lambda(j);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) CHECK(lam(a, b) == doctest::Approx(lam(b, a)));
    for (int t = 0; t < 20; ++t) {
      Vec v(3);
      for (auto& x : v) x = coord(rng);
      double q = 0.0;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) q += v[a] * lam(a, b) * v[b];
      CHECK(q >= -1e-12);
    }
  }
}

TEST_CASE("classify: single prototype always wins") {
  auto m = euclid_model({{0.0}}, {2});
  const auto out = classify(m, Vec{123.0});
  CHECK(out.predicted == 2);
  CHECK(out.cell == 0);
}

TEST_CASE("classify: zero distance wins") {
  auto m = euclid_model({{0.0}, {5.0}, {9.0}}, {1, 2, 3});
  const auto out = classify(m, Vec{9.0});
  CHECK(out.cell == 2);
  CHECK(out.predicted == 3);
}

TEST_CASE("classify: equidistant prototypes break to the smaller index") {
  auto m = euclid_model({{0.0}, {10.0}}, {1, 2});
  CHECK(classify(m, Vec{5.0}).cell == 0);
}

TEST_CASE("classify: invariant under increasing transforms of the distances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  auto m = lvqtest::random_model(rng, 2, 3, 2, MetricKind::euclidean);
  for (int t = 0; t < 50; ++t) {
    Vec x = {coord(rng), coord(rng)};
    std::size_t best = 0;
    double best_v = std::exp(std::sqrt(distance(m, 0, x)));
    for (std::size_t j = 1; j < m.num_prototypes(); ++j) {
      const double v = std::exp(std::sqrt(distance(m, j, x)));
      if (v < best_v) {
        best_v = v;
        best = j;
      }
    }
    CHECK(classify(m, x).cell == best);
  }
}

TEST_CASE("voronoi partition matches classify on every point") {
  auto m = euclid_model({{0.0}, {10.0}}, {1, 2});
  const auto data = make_dataset({{1.0}, {9.0}, {5.0}}, {1, 2, 1});
  const auto cells = voronoi_partition(m, data);
  CHECK(cells == std::vector<std::size_t>{0, 1, 0});

  std::mt19937_64 rng(23);
  auto rm = lvqtest::random_model(rng, 3, 3, 2, MetricKind::euclidean);
  const auto rd = lvqtest::random_labeled_data(rng, rm, 60);
  const auto rcells = voronoi_partition(rm, rd);
  for (std::size_t i = 0; i < rd.size(); ++i)
    CHECK(rcells[i] == classify(rm, rd.points[i]).cell);
}

TEST_CASE("csv: missing cells round-trip as empty fields") {
  LabeledDataset data = make_dataset(
      {{1.5, missing_value()}, {missing_value(), -2.25}, {0.1, 0.2}}, {1, 2, 2});
  const std::string path = "/tmp/lvq_test_data.csv";
  save_dataset_csv(data, path);
  const LabeledDataset back = load_dataset_csv(path);
  REQUIRE(back.size() == 3);
  CHECK(back.dim == 2);
  CHECK(back.num_classes == 2);
  CHECK(back.labels == data.labels);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t d = 0; d < 2; ++d) {
      CHECK(is_missing(back.points[i][d]) == is_missing(data.points[i][d]));
      if (!is_missing(data.points[i][d])) CHECK(back.points[i][d] == data.points[i][d]);
    }
}

TEST_CASE("csv: malformed files are rejected") {
  const std::string path = "/tmp/lvq_test_bad.csv";
  {
    std::ofstream out(path);
    out << "f1,label\n1.0,0\n";  // label must be positive
  }
  CHECK_THROWS_AS(load_dataset_csv(path), std::runtime_error);
  {
    std::ofstream out(path);
    out << "a,b\n";  // header must end in "label"
  }
  CHECK_THROWS_AS(load_dataset_csv(path), std::runtime_error);
}

TEST_CASE("model file: save/load/save is byte-stable") {
  std::mt19937_64 rng(31);
  auto m = lvqtest::random_model(rng, 3, 2, 2, MetricKind::local_matrices);
  const std::string p1 = "/tmp/lvq_test_model1.txt";
  const std::string p2 = "/tmp/lvq_test_model2.txt";
  save_model(m, p1);
  const PrototypeModel back = load_model(p1);
  save_model(back, p2);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(back.metric == MetricKind::local_matrices);
  CHECK(back.prototypes == m.prototypes);
  CHECK(back.omegas.size() == m.omegas.size());

  // With RSLVQ parameters attached.
  auto r = lvqtest::random_model(rng, 2, 3, 1, MetricKind::euclidean);
  r.rslvq = RslvqParams{{1.5, 1.5, 1.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  save_model(r, p1);
  const PrototypeModel rback = load_model(p1);
  save_model(rback, p2);
  CHECK(slurp(p1) == slurp(p2));
  REQUIRE(rback.rslvq.has_value());
  CHECK(rback.rslvq->sigma == r.rslvq->sigma);
}

TEST_CASE("model validation catches broken invariants") {
  auto m = euclid_model({{0.0}, {1.0}}, {1, 3});  // class 2 owns no prototype
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  auto bad = euclid_model({{0.0}}, {1});
  bad.rslvq = RslvqParams{{0.0}, {1.0}};  // bandwidth must be positive
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  auto bad2 = euclid_model({{0.0}}, {1});
  bad2.rslvq = RslvqParams{{1.0}, {0.5}};  // priors must sum to one
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_SUITE_END();
