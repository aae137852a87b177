#include "clustercache/hit_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "clustercache/allocation.hpp"
#include "clustercache/geometry.hpp"
#include "clustercache/rng.hpp"

namespace clustercache {

std::size_t max_pairwise_overlap(std::span<const FileSet> sets) {
  std::size_t worst = 0;
  for (std::size_t a = 0; a < sets.size(); ++a) {
    FileSet sa(sets[a].begin(), sets[a].end());
    std::sort(sa.begin(), sa.end());
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      FileSet sb(sets[b].begin(), sets[b].end());
      std::sort(sb.begin(), sb.end());
      FileSet common;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(common));
      worst = std::max(worst, common.size());
    }
  }
  return worst;
}

namespace {

void check_placement(std::span<const PopularityProfile> profiles, std::span<const FileSet> sets,
                     std::span<const double> fractions) {
  if (profiles.empty()) {
    throw std::invalid_argument("hit model: no profiles");
  }
  if (sets.size() != fractions.size()) {
    throw std::invalid_argument("hit model: number of cache sets and fractions differ");
  }
  const std::size_t f = profiles.front().probs.size();
  for (const auto& p : profiles) {
    if (p.probs.size() != f) {
      throw std::invalid_argument("hit model: profiles have mixed catalog sizes");
    }
  }
  for (const auto& s : sets) {
    for (std::size_t i : s) {
      if (i >= f) {
        throw std::invalid_argument("hit model: cache set names a file outside the catalog");
      }
    }
  }
  double total = 0.0;
  for (double x : fractions) {
    if (!(x >= 0.0)) {
      throw std::invalid_argument("hit model: negative fraction");
    }
    total += x;
  }
  if (total > 1.0 + 1e-9) {
    throw std::invalid_argument("hit model: fractions sum above 1");
  }
}

}  // namespace

AnalyticHit analytic_hit(std::span<const PopularityProfile> profiles, std::span<const FileSet> sets,
                         std::span<const double> fractions, double sbs_density, double radius) {
  check_placement(profiles, sets, fractions);
  const double load = coverage_load(sbs_density, radius);
  AnalyticHit out;
  double total = 0.0;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    total += cluster_mass(profiles, sets[k]) * -std::expm1(-fractions[k] * load);
  }
  out.unclamped = total / static_cast<double>(profiles.size());
  out.probability = std::clamp(out.unclamped, 0.0, 1.0);

  const std::size_t f = profiles.front().probs.size();
  std::vector<double> coverage(f, 0.0);  // summed fraction of SBSs caching file i
  for (std::size_t k = 0; k < sets.size(); ++k) {
    FileSet unique(sets[k].begin(), sets[k].end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (std::size_t i : unique) {
      coverage[i] += fractions[k];
    }
  }
  double exact = 0.0;
  for (std::size_t i = 0; i < f; ++i) {
    if (coverage[i] == 0.0) {
      continue;
    }
    double mass = 0.0;
    for (const auto& p : profiles) {
      mass += p.probs[i];
    }
    exact += mass * -std::expm1(-coverage[i] * load);
  }
  out.exact = exact / static_cast<double>(profiles.size());
  out.max_overlap = max_pairwise_overlap(sets);
  out.overlap_warning = out.max_overlap > 0;
  return out;
}

double analytic_hit_baseline(std::span<const PopularityProfile> profiles, std::size_t cache_size,
                             double sbs_density, double radius) {
  const FileSet global = cluster_top_m(profiles, cache_size);
  const double ones[] = {1.0};
  return analytic_hit(profiles, std::span<const FileSet>(&global, 1), ones, sbs_density, radius)
      .probability;
}

HitReport monte_carlo_hit(const NetworkConfig& config, std::span<const PopularityProfile> profiles,
                          std::span<const FileSet> sets, std::span<const double> fractions,
                          std::size_t n_trials, std::uint64_t seed,
                          const MonteCarloOptions& options) {
  check_placement(profiles, sets, fractions);
  if (n_trials < 1) {
    throw std::invalid_argument("monte_carlo_hit: n_trials must be >= 1");
  }
  if (!(config.user_density > 0.0)) {
    throw std::invalid_argument("monte_carlo_hit: user density must be positive");
  }
  if (!(config.radius > 0.0) || !(config.sbs_density >= 0.0)) {
    throw std::invalid_argument("monte_carlo_hit: invalid radius or SBS density");
  }

  const std::size_t n_profiles = profiles.size();
  const std::size_t f = profiles.front().probs.size();

  std::vector<std::vector<double>> cdf(n_profiles, std::vector<double>(f));
  for (std::size_t u = 0; u < n_profiles; ++u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f; ++i) {
      acc += profiles[u].probs[i];
      cdf[u][i] = acc;
    }
  }
  std::vector<std::vector<std::size_t>> holders(f);  // file -> clusters caching it
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (std::size_t i : sets[k]) {
      if (holders[i].empty() || holders[i].back() != k) {
        holders[i].push_back(k);
      }
    }
  }

  const Region sbs_region =
      options.guard_band ? config.region.expanded(config.radius) : config.region;
  const double radius = config.radius;

  std::vector<std::size_t> hits(n_trials, 0);
  std::vector<std::size_t> requests(n_trials, 0);
  std::vector<std::size_t> resampled(n_trials, 0);

  auto run_trial = [&](std::size_t t) {
    Rng rng = make_stream(seed, t);
    const PointSet sbs = sample_ppp(config.sbs_density, sbs_region, rng);
    const auto labels = thin_labels(sbs.size(), fractions, rng);
    std::vector<std::vector<std::size_t>> members(sets.size());
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] >= 0) {
        members[static_cast<std::size_t>(labels[j])].push_back(j);
      }
    }
    std::vector<GridIndex> index;
    index.reserve(sets.size());
    for (const auto& m : members) {
      index.emplace_back(sbs, m, radius);
    }

    PointSet users = sample_ppp(config.user_density, config.region, rng);
    while (users.size() == 0) {
      if (resampled[t] == options.max_resamples_per_trial) {
        throw std::runtime_error("monte_carlo_hit: user process keeps coming up empty");
      }
      ++resampled[t];
      users = sample_ppp(config.user_density, config.region, rng);
    }

    std::uniform_int_distribution<std::size_t> offset_dist(0, n_profiles - 1);
    const std::size_t offset = offset_dist(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t h = 0;
    for (std::size_t j = 0; j < users.size(); ++j) {
      const auto& c = cdf[(offset + j) % n_profiles];
      const double draw = unit(rng) * c.back();
      std::size_t file = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), draw) - c.begin());
      file = std::min(file, f - 1);
      for (std::size_t k : holders[file]) {
        if (index[k].any_within(users.positions[j], radius)) {
          ++h;
          break;
        }
      }
    }
    hits[t] = h;
    requests[t] = users.size();
  };

  std::size_t workers = options.workers == 0 ? std::thread::hardware_concurrency() : options.workers;
  workers = std::clamp<std::size_t>(workers, 1, n_trials);
  if (workers == 1) {
    for (std::size_t t = 0; t < n_trials; ++t) {
      run_trial(t);
    }
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t t = w; t < n_trials; t += workers) {
              run_trial(t);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  HitReport report;
  report.n_trials = n_trials;
  std::size_t total_hits = 0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    total_hits += hits[t];
    report.n_requests += requests[t];
    report.resampled_trials += resampled[t] > 0 ? 1 : 0;
  }
  const double n_req = static_cast<double>(report.n_requests);
  const double p = static_cast<double>(total_hits) / n_req;
  report.mc_estimate = p;
  double variance = 0.0;
  if (n_trials > 1) {
    double ss = 0.0;
    for (std::size_t t = 0; t < n_trials; ++t) {
      const double resid = static_cast<double>(hits[t]) - p * static_cast<double>(requests[t]);
      ss += resid * resid;
    }
    const double n = static_cast<double>(n_trials);
    variance = n / (n - 1.0) * ss / (n_req * n_req);
  } else {
    variance = p * (1.0 - p) / n_req;
  }
  report.mc_halfwidth_95 = 1.959963984540054 * std::sqrt(variance);

  const auto analytic = analytic_hit(profiles, sets, fractions, config.sbs_density, config.radius);
  report.analytic = analytic.probability;
  report.overlap_warning = analytic.overlap_warning;
  std::size_t m = config.cache_size;
  if (!sets.empty()) {
    m = sets.front().size();
  }
  report.baseline_analytic =
      analytic_hit_baseline(profiles, std::min(m, f), config.sbs_density, config.radius);
  return report;
}

}  // namespace clustercache
