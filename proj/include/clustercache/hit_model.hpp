#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustercache/network.hpp"

namespace clustercache {

using FileSet = std::vector<std::size_t>;

struct AnalyticHit {
  double probability = 0.0;  // clamped to [0, 1]
  double unclamped = 0.0;
  /// Hit probability of the thinned placement with overlaps handled exactly:
  /// (1/N_u) sum_u sum_i p_iu (1 - exp(-load * sum_{k : i in D_k} x_k)).
  /// Equals `unclamped` when the cache sets are disjoint.
  double exact = 0.0;
  /// Largest pairwise intersection between cache sets; non-zero means the
  /// summed form double-counts some requests.
  std::size_t max_overlap = 0;
  bool overlap_warning = false;
};

/// Size of the largest pairwise intersection among `sets`.
std::size_t max_pairwise_overlap(std::span<const FileSet> sets);

/// (1/N_u) sum_k sum_u (sum_{i in D_k} p_iu) (1 - exp(-x_k lambda_s pi R^2)).
AnalyticHit analytic_hit(std::span<const PopularityProfile> profiles, std::span<const FileSet> sets,
                         std::span<const double> fractions, double sbs_density, double radius);

/// Single network-wide cache set (top-M of the mean profile) on every SBS.
double analytic_hit_baseline(std::span<const PopularityProfile> profiles, std::size_t cache_size,
                             double sbs_density, double radius);

struct MonteCarloOptions {
  /// Sample SBSs over the region grown by R so users near the border see the
  /// same SBS density as interior users.
  bool guard_band = true;
  /// 0 = std::thread::hardware_concurrency().
  std::size_t workers = 0;
  std::size_t max_resamples_per_trial = 1000;
};

struct HitReport {
  double analytic = 0.0;
  double mc_estimate = 0.0;
  double mc_halfwidth_95 = 0.0;
  std::size_t n_trials = 0;    // spatial realizations
  std::size_t n_requests = 0;  // user-trials
  std::size_t resampled_trials = 0;
  double baseline_analytic = 0.0;
  bool overlap_warning = false;
};

/// Monte Carlo estimate of the hit probability of a placement.
///
/// Each trial samples an SBS PPP (density lambda_s), labels SBSs by independent
/// thinning with probabilities x_k, and drops a user PPP (density lambda) with
/// profiles cycled from a random offset. Each user requests one file from its
/// profile; the request hits if an SBS labelled with a cache set containing
/// the file lies within R. Trial t draws from its own RNG stream, so the
/// result does not depend on the worker count. The 95% half-width uses the
/// between-trial variance of the ratio estimator.
HitReport monte_carlo_hit(const NetworkConfig& config, std::span<const PopularityProfile> profiles,
                          std::span<const FileSet> sets, std::span<const double> fractions,
                          std::size_t n_trials, std::uint64_t seed,
                          const MonteCarloOptions& options = {});

}  // namespace clustercache
