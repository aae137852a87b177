#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "clustercache/allocation.hpp"
#include "clustercache/hit_model.hpp"

using namespace clustercache;

namespace {

struct Fixture {
  PlantedScenario scenario;
  Profiles profiles;
  std::vector<FileSet> sets;
  std::vector<double> fractions;
};

Fixture planted_fixture(double sbs_density, double radius, std::size_t cache_size = 10) {
  Fixture f;
  f.scenario = make_planted_scenario(4, 100, 25, 0.0, 0.9, 200, 31);
  f.profiles = generate_profiles(f.scenario, 200, 100, 32);
  std::vector<double> masses;
  for (std::size_t c = 0; c < 4; ++c) {
    Profiles members;
    for (const auto& p : f.profiles)
      if (f.scenario.membership[p.user_id] == c) members.push_back(p);
    f.sets.push_back(cluster_top_m(members, cache_size));
    masses.push_back(cluster_mass(f.profiles, f.sets.back()));
  }
  f.fractions = optimize_fractions(masses, sbs_density, radius, f.profiles.size()).fractions;
  return f;
}

}  // namespace

TEST_CASE("analytic hit on hand cases") {
  Profiles p{{0, {0.5, 0.3, 0.2}}, {1, {0.2, 0.2, 0.6}}};
  const double load = coverage_load(10.0, 0.5);

  SUBCASE("no SBS share gives zero") {
    const std::vector<FileSet> sets{{0}, {2}};
    const std::vector<double> x{0.0, 0.0};
    CHECK(analytic_hit(p, sets, x, 10.0, 0.5).probability == 0.0);
  }
  SUBCASE("full catalog on every SBS gives the coverage probability") {
    const std::vector<FileSet> sets{{0, 1, 2}};
    const std::vector<double> x{1.0};
    const auto h = analytic_hit(p, sets, x, 10.0, 0.5);
    CHECK(h.probability == doctest::Approx(1.0 - std::exp(-load)));
    CHECK(h.exact == doctest::Approx(h.unclamped));
  }
  SUBCASE("baseline with M = F") {
    CHECK(analytic_hit_baseline(p, 3, 10.0, 0.5) == doctest::Approx(1.0 - std::exp(-load)));
  }
  SUBCASE("baseline with M = 1 serves the top file of the mean profile") {
    // mean = {0.35, 0.25, 0.4}
    CHECK(analytic_hit_baseline(p, 1, 10.0, 0.5) == doctest::Approx(0.4 * (1.0 - std::exp(-load))));
  }
  SUBCASE("hand-summed two-cluster value") {
    const std::vector<FileSet> sets{{0}, {2}};
    const std::vector<double> x{0.3, 0.7};
    const double want = 0.5 * ((0.5 + 0.2) * (1.0 - std::exp(-0.3 * load)) +
                               (0.2 + 0.6) * (1.0 - std::exp(-0.7 * load)));
    const auto h = analytic_hit(p, sets, x, 10.0, 0.5);
    CHECK(h.probability == doctest::Approx(want));
    CHECK(h.exact == doctest::Approx(want));
    CHECK_FALSE(h.overlap_warning);
  }
}

TEST_CASE("overlapping cache sets") {
  Profiles p{{0, {0.5, 0.3, 0.2}}, {1, {0.2, 0.2, 0.6}}};
  const std::vector<FileSet> sets{{0, 1, 2}, {0, 1, 2}};
  const std::vector<double> x{0.5, 0.5};
  const auto h = analytic_hit(p, sets, x, 50.0, 1.0);
  CHECK(h.overlap_warning);
  CHECK(h.max_overlap == 3);
  CHECK(h.unclamped > 1.0);
  CHECK(h.probability == 1.0);
  // Both halves together cover every SBS.
  CHECK(h.exact == doctest::Approx(1.0 - std::exp(-coverage_load(50.0, 1.0))));
  CHECK(max_pairwise_overlap(std::vector<FileSet>{{0, 1}, {1, 2}, {3}}) == 1);
}

TEST_CASE("analytic hit input checks") {
  Profiles p{{0, {0.5, 0.5}}};
  CHECK_THROWS(analytic_hit(p, std::vector<FileSet>{{0}}, std::vector<double>{0.6, 0.4}, 1.0, 1.0));
  CHECK_THROWS(analytic_hit(p, std::vector<FileSet>{{5}}, std::vector<double>{1.0}, 1.0, 1.0));
  CHECK_THROWS(analytic_hit(p, std::vector<FileSet>{{0}, {1}}, std::vector<double>{0.7, 0.7}, 1.0, 1.0));
}

TEST_CASE("analytic hit is monotone in R, lambda_s and M") {
  for (double r = 0.3; r < 1.0; r += 0.1) {
    const auto f = planted_fixture(10.0, 0.5);
    CHECK(analytic_hit(f.profiles, f.sets, f.fractions, 10.0, r + 0.1).probability >=
          analytic_hit(f.profiles, f.sets, f.fractions, 10.0, r).probability);
    CHECK(analytic_hit_baseline(f.profiles, 10, 10.0, r + 0.1) >= analytic_hit_baseline(f.profiles, 10, 10.0, r));
  }
  const auto f = planted_fixture(10.0, 0.5);
  for (double ls = 2.0; ls < 30.0; ls += 2.0) {
    CHECK(analytic_hit(f.profiles, f.sets, f.fractions, ls + 2.0, 0.5).probability >=
          analytic_hit(f.profiles, f.sets, f.fractions, ls, 0.5).probability);
  }
  double previous = 0.0;
  for (std::size_t m = 1; m <= 25; ++m) {
    const auto g = planted_fixture(10.0, 0.5, m);
    const double h = analytic_hit(g.profiles, g.sets, g.fractions, 10.0, 0.5).probability;
    CHECK(h >= previous - 1e-12);
    previous = h;
  }
}

TEST_CASE("Monte Carlo agrees with the analytic value") {
  NetworkConfig config;
  const auto f = planted_fixture(config.sbs_density, config.radius);
  const auto report = monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 200, 5);
  CHECK(report.n_trials == 200);
  CHECK(report.n_requests > 30000);
  CHECK(report.mc_halfwidth_95 > 0.0);
  CHECK(std::abs(report.mc_estimate - report.analytic) <= 4.0 * report.mc_halfwidth_95 / 1.96);
}

TEST_CASE("Monte Carlo edge cases") {
  NetworkConfig config;
  const auto f = planted_fixture(config.sbs_density, config.radius);

  SUBCASE("zero fractions never hit") {
    const std::vector<double> zero(f.sets.size(), 0.0);
    CHECK(monte_carlo_hit(config, f.profiles, f.sets, zero, 20, 3).mc_estimate == 0.0);
  }
  SUBCASE("huge radius and full catalog always hit") {
    NetworkConfig wide = config;
    wide.radius = 100.0;
    FileSet all(100);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const std::vector<FileSet> sets{all};
    const std::vector<double> x{1.0};
    const auto r = monte_carlo_hit(wide, f.profiles, sets, x, 10, 3);
    CHECK(r.mc_estimate == 1.0);
    CHECK(r.analytic == doctest::Approx(1.0));
  }
  SUBCASE("results do not depend on the worker count") {
    MonteCarloOptions one;
    one.workers = 1;
    MonteCarloOptions four;
    four.workers = 4;
    const auto a = monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 40, 11, one);
    const auto b = monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 40, 11, four);
    CHECK(a.mc_estimate == b.mc_estimate);
    CHECK(a.mc_halfwidth_95 == b.mc_halfwidth_95);
    CHECK(a.n_requests == b.n_requests);
  }
  SUBCASE("half-width shrinks like one over root n") {
    const auto small = monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 100, 13);
    const auto large = monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 400, 13);
    const double ratio = small.mc_halfwidth_95 / large.mc_halfwidth_95;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
  }
  CHECK_THROWS(monte_carlo_hit(config, f.profiles, f.sets, f.fractions, 0, 1));
}
