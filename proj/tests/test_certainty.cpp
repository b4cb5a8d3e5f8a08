#include <cmath>
#include <random>

#include "doctest.h"
#include "lvq/certainty.hpp"
#include "lvq/classifiers.hpp"
#include "testutil.hpp"

using namespace lvq;

namespace {

PrototypeModel two_proto_1d(double w1, double w2) {
  PrototypeModel m;
  m.dim = 1;
  m.prototypes = {{w1}, {w2}};
  m.proto_labels = {1, 2};
  return m;
}

GenerativeMixture symmetric_pair(double sep, double sd) {
  GenerativeMixture mix;
  mix.dim = 1;
  mix.num_classes = 2;
  mix.components.push_back({{-sep / 2}, {sd}, 0.5, 1});
  mix.components.push_back({{sep / 2}, {sd}, 0.5, 2});
  return mix;
}

}  // namespace

TEST_SUITE_BEGIN("certainty");

TEST_CASE("relsim: midpoint is maximally uncertain") {
  const auto m = two_proto_1d(0.0, 10.0);
  CHECK(relsim(m, Vec{5.0}) == doctest::Approx(0.0));
}

TEST_CASE("relsim: ratio arithmetic and scale invariance") {
  // d+ = 1, d- = 3 -> 0.5; doubling both distances changes nothing.
  const auto m = two_proto_1d(0.0, 1.0 + std::sqrt(3.0));
  CHECK(relsim(m, Vec{1.0}) == doctest::Approx(0.5));
  const auto m2 = two_proto_1d(0.0, std::sqrt(2.0) + std::sqrt(6.0));
  CHECK(relsim(m2, Vec{std::sqrt(2.0)}) == doctest::Approx(0.5));
}

TEST_CASE("relsim: coincident prototypes of two classes give zero") {
  const auto m = two_proto_1d(0.0, 0.0);
  CHECK(relsim(m, Vec{0.0}) == 0.0);
}

TEST_CASE("relsim: the value one needs d+ = 0 and d- > 0") {
  const auto m = two_proto_1d(0.0, 4.0);
  CHECK(relsim(m, Vec{0.0}) == doctest::Approx(1.0));
  std::mt19937_64 rng(201);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  for (int t = 0; t < 100; ++t) {
    const double x = coord(rng);
    if (x == 0.0 || x == 4.0) continue;
    CHECK(relsim(m, Vec{x}) < 1.0);
  }
}

TEST_CASE("relsim: nonnegative, positive iff the winner is strict") {
  std::mt19937_64 rng(203);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  auto m = lvqtest::random_model(rng, 2, 3, 2, MetricKind::euclidean);
  for (int t = 0; t < 100; ++t) {
    const Vec x = {coord(rng), coord(rng)};
    const double r = relsim(m, x);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
    // The winner's class carries d+, so positivity means its distance is
    // strictly below every other class's best.
    const auto out = classify(m, x);
    double best_other = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.num_prototypes(); ++j)
      if (m.proto_labels[j] != out.predicted)
        best_other = std::min(best_other, distance(m, j, x));
    CHECK((r > 0.0) == (distance(m, out.cell, x) < best_other));
  }
}

TEST_CASE("relsim: invariant under uniform metric rescaling") {
  std::mt19937_64 rng(207);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  auto m = lvqtest::random_model(rng, 3, 2, 2, MetricKind::local_matrices);
  auto scaled = m;
  for (auto& om : scaled.omegas) om.scale(3.7);  // Lambda scales by 3.7^2
  for (int t = 0; t < 50; ++t) {
    const Vec x = {coord(rng), coord(rng), coord(rng)};
    CHECK(relsim(m, x) == doctest::Approx(relsim(scaled, x)));
  }
}

TEST_CASE("conf equals the posterior maximum and respects its bounds") {
  std::mt19937_64 rng(211);
  auto m = lvqtest::random_model(rng, 2, 4, 2, MetricKind::euclidean);
  RslvqParams par;
  par.sigma.assign(m.num_prototypes(), 1.3);
  par.priors.assign(m.num_prototypes(), 1.0 / static_cast<double>(m.num_prototypes()));
  m.rslvq = std::move(par);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  for (int t = 0; t < 50; ++t) {
    const Vec x = {coord(rng), coord(rng)};
    const auto post = posterior(m, x);
    const double c = conf(m, x);
    CHECK(c == doctest::Approx(*std::max_element(post.begin(), post.end())));
    CHECK(c >= 1.0 / 4 - 1e-12);
    CHECK(c <= 1.0 + 1e-12);
  }
}

TEST_CASE("bayes certainty: symmetric midpoint is a coin flip") {
  const auto mix = symmetric_pair(4.0, 1.0);
  CHECK(bayes_certainty(mix, Vec{0.0}) == doctest::Approx(0.5));
  CHECK(bayes_certainty(mix, Vec{-2.0}) > 0.95);
  CHECK(bayes_classify(mix, Vec{-2.0}) == 1);
  CHECK(bayes_classify(mix, Vec{2.0}) == 2);
}

TEST_CASE("bayes certainty: matches a direct density evaluation on a grid") {
  GenerativeMixture mix;
  mix.dim = 2;
  mix.num_classes = 2;
  mix.components.push_back({{-4.0, 4.0}, {5.2, 2.5}, 0.475, 1});
  mix.components.push_back({{4.5, 0.5}, {7.1, 2.1}, 0.475, 2});
  mix.noise = UniformNoise{0.05, {-20.0, -5.0}, {25.0, 12.0}};
  mix.validate();

  const auto direct = [&](const Vec& x) {
    double per_class[2] = {0.0, 0.0};
    for (const auto& c : mix.components) {
      double dens = c.prior;
      for (std::size_t d = 0; d < 2; ++d)
        dens *= std::exp(-0.5 * ((x[d] - c.mean[d]) / c.stddev[d]) *
                         ((x[d] - c.mean[d]) / c.stddev[d])) /
                (c.stddev[d] * std::sqrt(2.0 * M_PI));
      per_class[c.label - 1] += dens;
    }
    const auto& n = *mix.noise;
    if (x[0] >= n.lo[0] && x[0] <= n.hi[0] && x[1] >= n.lo[1] && x[1] <= n.hi[1]) {
      const double u = n.mass / ((n.hi[0] - n.lo[0]) * (n.hi[1] - n.lo[1])) / 2.0;
      per_class[0] += u;
      per_class[1] += u;
    }
    return std::max(per_class[0], per_class[1]) / (per_class[0] + per_class[1]);
  };

  for (double x = -22.0; x <= 27.0; x += 2.4) {
    for (double y = -6.0; y <= 13.0; y += 1.7) {
      const Vec p = {x, y};
      CHECK(bayes_certainty(mix, p) == doctest::Approx(direct(p)).epsilon(1e-10));
    }
  }
}

TEST_CASE("bayes certainty: zero density falls back to the uniform value") {
  GenerativeMixture mix;
  mix.dim = 1;
  mix.num_classes = 3;
  mix.noise = UniformNoise{1.0, {0.0}, {1.0}};
  mix.validate();
  CHECK(bayes_certainty(mix, Vec{5.0}) == doctest::Approx(1.0 / 3));
}

TEST_CASE("bayes certainty stays within [1/Z, 1]") {
  const auto mix = symmetric_pair(3.0, 1.5);
  std::mt19937_64 rng(213);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int t = 0; t < 100; ++t) {
    const double r = bayes_certainty(mix, Vec{coord(rng)});
    CHECK(r >= 0.5 - 1e-12);
    CHECK(r <= 1.0 + 1e-12);
  }
}

TEST_CASE("mixture sidecar round-trips") {
  GenerativeMixture mix;
  mix.dim = 2;
  mix.num_classes = 2;
  mix.components.push_back({{-4.0, 4.0}, {5.2, 2.5}, 0.475, 1});
  mix.components.push_back({{4.5, 0.5}, {7.1, 2.1}, 0.475, 2});
  mix.noise = UniformNoise{0.05, {-20.0, -5.0}, {25.0, 12.0}};
  const std::string path = "/tmp/lvq_test_mixture.txt";
  save_mixture(mix, path);
  const auto back = load_mixture(path);
  REQUIRE(back.components.size() == 2);
  CHECK(back.components[0].mean == mix.components[0].mean);
  CHECK(back.components[1].stddev == mix.components[1].stddev);
  REQUIRE(back.noise.has_value());
  CHECK(back.noise->mass == mix.noise->mass);
}

TEST_SUITE_END();
