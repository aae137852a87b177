#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <vector>

#include "clustercache/geometry.hpp"

using namespace clustercache;

TEST_CASE("region rejects degenerate sizes") {
  CHECK_THROWS_AS(Region(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Region(1.0, -2.0), std::invalid_argument);
  const Region r(6.0, 6.0);
  CHECK(r.area() == doctest::Approx(36.0));
  CHECK(r.contains({0.0, 6.0}));
  CHECK_FALSE(r.contains({6.1, 1.0}));
  const Region grown = r.expanded(0.5);
  CHECK(grown.area() == doctest::Approx(49.0));
  CHECK(grown.contains({-0.5, 6.5}));
}

TEST_CASE("sample_ppp edge cases") {
  const Region r(6.0, 6.0);
  CHECK(sample_ppp(0.0, r, 7).size() == 0);
  CHECK_THROWS_AS(sample_ppp(-1.0, r, 7), std::invalid_argument);

  const PointSet a = sample_ppp(10.0, r, 42);
  const PointSet b = sample_ppp(10.0, r, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.positions[i].x == b.positions[i].x);
    CHECK(a.positions[i].y == b.positions[i].y);
    CHECK(r.contains(a.positions[i]));
  }
}

TEST_CASE("ppp counts are Poisson: mean and variance within 3 standard errors") {
  const Region r(6.0, 6.0);
  const double intensity = 10.0;
  const double mu = intensity * r.area();  // 360
  const int draws = 10000;
  std::vector<double> counts;
  counts.reserve(draws);
  for (int s = 0; s < draws; ++s) {
    counts.push_back(static_cast<double>(sample_ppp(intensity, r, 1000 + s).size()));
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / draws;
  double ss = 0.0;
  for (double c : counts) ss += (c - mean) * (c - mean);
  const double var = ss / (draws - 1);
  const double se_mean = std::sqrt(mu / draws);
  // Var of the sample variance for Poisson(mu): (mu4 - mu^2)/n, mu4 = mu + 3 mu^2.
  const double se_var = std::sqrt((mu + 2.0 * mu * mu) / draws);
  CHECK(std::abs(mean - mu) <= 3.0 * se_mean);
  CHECK(std::abs(var - mu) <= 3.0 * se_var);
}

TEST_CASE("ppp positions pass a 6x6 chi-square uniformity test at 0.01") {
  const Region r(6.0, 6.0);
  std::vector<double> bins(36, 0.0);
  double total = 0.0;
  for (int s = 0; s < 20; ++s) {
    for (const auto& p : sample_ppp(5.0, r, 500 + s).positions) {
      const auto cx = std::min<std::size_t>(5, static_cast<std::size_t>(p.x));
      const auto cy = std::min<std::size_t>(5, static_cast<std::size_t>(p.y));
      bins[cy * 6 + cx] += 1.0;
      total += 1.0;
    }
  }
  const double expected = total / 36.0;
  double chi2 = 0.0;
  for (double o : bins) chi2 += (o - expected) * (o - expected) / expected;
  const boost::math::chi_squared dist(35.0);
  CHECK(chi2 < boost::math::quantile(dist, 0.99));
}

TEST_CASE("points_within") {
  PointSet empty;
  CHECK(points_within(empty, {0, 0}, 1.0) == 0);

  PointSet one;
  one.region = Region(10.0, 10.0);
  one.positions = {{3.0, 4.0}};
  CHECK(points_within(one, {0.0, 0.0}, 5.0) == 1);  // exactly R: closed ball
  CHECK(points_within(one, {0.0, 0.0}, 4.999) == 0);
  CHECK_THROWS_AS(points_within(one, {0, 0}, -1.0), std::invalid_argument);

  SUBCASE("matches an exhaustive scan and the grid index") {
    const Region r(6.0, 6.0);
    Rng rng(9);
    PointSet pts = sample_ppp(100.0 / 36.0, r, rng);
    pts.positions.resize(std::min<std::size_t>(pts.size(), 100));
    std::vector<std::size_t> odd;
    for (std::size_t i = 1; i < pts.size(); i += 2) odd.push_back(i);
    const GridIndex all_index(pts, 0.7);
    const GridIndex odd_index(pts, odd, 0.7);
    std::uniform_real_distribution<double> u(-0.5, 6.5);
    for (int q = 0; q < 300; ++q) {
      const Point c{u(rng), u(rng)};
      const double radius = 0.05 + 0.01 * q;
      std::size_t brute = 0;
      std::size_t brute_odd = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::hypot(pts.positions[i].x - c.x, pts.positions[i].y - c.y);
        if (d <= radius) {
          ++brute;
          if (i % 2 == 1) ++brute_odd;
        }
      }
      CHECK(points_within(pts, c, radius) == brute);
      CHECK(points_within(pts, c, radius, odd) == brute_odd);
      CHECK(all_index.count_within(c, radius) == brute);
      CHECK(odd_index.count_within(c, radius) == brute_odd);
      CHECK(all_index.any_within(c, radius) == (brute > 0));
    }
  }
}

TEST_CASE("points_within is monotone in radius") {
  const PointSet pts = sample_ppp(20.0, Region(3.0, 3.0), 77);
  std::size_t prev = 0;
  for (double radius = 0.0; radius < 3.0; radius += 0.05) {
    const std::size_t n = points_within(pts, {1.5, 1.5}, radius);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("thinning follows the label probabilities") {
  Rng rng(3);
  const std::vector<double> probs{0.2, 0.5};
  const auto labels = thin_labels(200000, probs, rng);
  std::vector<double> freq(3, 0.0);
  for (int l : labels) freq[static_cast<std::size_t>(l + 1)] += 1.0 / labels.size();
  CHECK(freq[0] == doctest::Approx(0.3).epsilon(0.02));
  CHECK(freq[1] == doctest::Approx(0.2).epsilon(0.02));
  CHECK(freq[2] == doctest::Approx(0.5).epsilon(0.02));

  const std::vector<double> none{0.0, 0.0};
  for (int l : thin_labels(100, none, rng)) CHECK(l == -1);
  const std::vector<double> too_much{0.7, 0.7};
  CHECK_THROWS_AS(thin_labels(1, too_much, rng), std::invalid_argument);
}
