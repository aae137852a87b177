#include <doctest.h>

#include <cmath>
#include <numbers>

#include "clustercache/clustering.hpp"
#include "clustercache/model_selection.hpp"
#include "oracles.hpp"

using namespace clustercache;

namespace {

// Variance rule of the standard likelihood, restated for the oracle.
double standard_rule(double own, double pooled) {
  return std::max(own < kVarianceFloor ? pooled : own, kVarianceFloor);
}

}  // namespace

TEST_CASE("hand-evaluated log-likelihood: two users at C +- delta") {
  const double delta = 0.01;
  const std::size_t f = 5;
  std::vector<double> c{0.2, 0.2, 0.2, 0.2, 0.2};
  auto up = c;
  auto down = c;
  up[2] += delta;
  down[2] -= delta;
  Profiles p{{0, up}, {1, down}};
  const auto m = update_centroids(p, {0, 0}, 1);
  CHECK(m.variances[0] == doctest::Approx(delta * delta));
  const double expected =
      2.0 * (-(static_cast<double>(f) / 2.0) * std::log(2.0 * std::numbers::pi * delta * delta) - 0.5);
  CHECK(log_likelihood(m, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical users hit the variance floor") {
  Profiles same(4, PopularityProfile{0, {0.1, 0.9}});
  const auto m = update_centroids(same, {0, 0, 0, 0}, 1);
  const auto s = aic(m, same);
  CHECK(std::isfinite(s.log_likelihood));
  CHECK(s.degenerate_clusters == std::vector<std::size_t>{0});
}

TEST_CASE("singleton clusters borrow the pooled variance") {
  Profiles p{{0, {0.5, 0.5}}, {1, {0.6, 0.4}}, {2, {0.0, 1.0}}};
  const auto m = update_centroids(p, {0, 0, 1}, 2);
  CHECK(effective_variance(m, 1) == doctest::Approx(pooled_variance(m)));
  CHECK(pooled_variance(m) == doctest::Approx(2.0 * m.variances[0] / 3.0));
  CHECK(aic(m, p).degenerate_clusters == std::vector<std::size_t>{1});
}

TEST_CASE("AIC bookkeeping") {
  Profiles p;
  for (std::size_t u = 0; u < 6; ++u) {
    std::vector<double> v(10, 0.1);
    v[u % 10] += 0.01 * static_cast<double>(u);
    v[(u + 1) % 10] -= 0.01 * static_cast<double>(u) * 0.5;
    v[(u + 2) % 10] -= 0.01 * static_cast<double>(u) * 0.5;
    p.push_back({u, v});
  }
  const auto m3 = update_centroids(p, {0, 0, 1, 1, 2, 2}, 3);
  const auto s = aic(m3, p);
  CHECK(s.parameter_count == 33);  // i (F + 1) with i = 3, F = 10
  CHECK(s.aic - 2.0 * 33 == doctest::Approx(-2.0 * s.log_likelihood));
  CHECK(s.aic_normalized == doctest::Approx(s.aic / 6.0));

  // One cluster fewer lowers the penalty by exactly 2 (F + 1).
  const auto s2 = aic(update_centroids(p, {0, 0, 1, 1, 1, 1}, 2), p);
  CHECK(s2.parameter_count == 22);
  const double penalty3 = s.aic + 2.0 * s.log_likelihood;
  const double penalty2 = s2.aic + 2.0 * s2.log_likelihood;
  CHECK(penalty3 - penalty2 == doctest::Approx(22.0));
}

TEST_CASE("select_model") {
  auto score = [](std::size_t i, double a) {
    ModelScore s;
    s.cluster_count = i;
    s.aic = a;
    return s;
  };
  std::vector<ModelScore> one{score(3, 1.0)};
  CHECK(select_model(one).cluster_count == 3);
  std::vector<ModelScore> three{score(2, 10.0), score(3, 3.0), score(4, 7.0)};
  CHECK(select_model(three).aic == 3.0);
  std::vector<ModelScore> tie{score(6, -5.0), score(4, -5.0), score(5, 1.0)};
  CHECK(select_model(tie).cluster_count == 4);
  CHECK_THROWS(select_model(std::vector<ModelScore>{}));
}

TEST_CASE("aggregated likelihood equals per-point Gaussian summation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sc = make_planted_scenario(3, 12, 4, 0.5, 0.7, 30, seed);
    const auto p = generate_profiles(sc, 30, 12, seed + 50);
    std::vector<std::size_t> a(30);
    for (std::size_t u = 0; u < 30; ++u) a[u] = (u * 5 + seed) % 4;
    a[7] = 3;  // cluster 3 may be a singleton
    const auto m = update_centroids(p, a, 4);
    const double got = log_likelihood(m, p);
    const double want = oracle::pointwise_log_likelihood(p, m.assignment, 4, standard_rule);
    CHECK(std::abs(got - want) <= 1e-8 * std::abs(want));
  }
}

TEST_CASE("printed closed form is evaluated verbatim") {
  Profiles p{{0, {0.3, 0.7}}, {1, {0.5, 0.5}}, {2, {0.9, 0.1}}};
  const auto m = update_centroids(p, {0, 0, 1}, 2);
  double want = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double nk = static_cast<double>(m.counts[k]);
    const double s2 = std::max(m.variances[k], kVarianceFloor);
    want += -nk / 2.0 * (std::log(2.0 * std::numbers::pi) - 1.0 + 2.0 * std::log(nk / 3.0) - 2.0 * std::log(s2));
  }
  CHECK(log_likelihood(m, p, LikelihoodForm::PrintedClosedForm) == doctest::Approx(want));
}

TEST_CASE("recomputing the means never lowers the likelihood") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto sc = make_planted_scenario(2, 10, 5, 0.0, 0.6, 20, seed);
    const auto p = generate_profiles(sc, 20, 10, seed + 9);
    const auto refined = update_centroids(p, sc.membership, 2);
    // Same assignment, centroids shifted off the mean; variances measured
    // around the shifted centroids.
    ClusterModel shifted = refined;
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, 0.01);
    for (auto& c : shifted.centroids)
      for (auto& v : c) v += n(rng);
    std::fill(shifted.variances.begin(), shifted.variances.end(), 0.0);
    for (std::size_t u = 0; u < 20; ++u)
      shifted.variances[sc.membership[u]] +=
          oracle::sq_dist(p[u].probs, shifted.centroids[sc.membership[u]]) /
          static_cast<double>(shifted.counts[sc.membership[u]]);
    CHECK(log_likelihood(refined, p) >= log_likelihood(shifted, p));
  }
}

TEST_CASE("likelihood input checks") {
  Profiles p{{0, {0.5, 0.5}}, {1, {0.4, 0.6}}};
  auto m = update_centroids(p, {0, 1}, 2);
  Profiles wider{{0, {0.5, 0.25, 0.25}}, {1, {0.4, 0.3, 0.3}}};
  CHECK_THROWS(log_likelihood(m, wider));
  m.counts[1] = 0;
  CHECK_THROWS(log_likelihood(m, p));
}
