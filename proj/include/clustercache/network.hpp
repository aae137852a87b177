#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustercache/geometry.hpp"

namespace clustercache {

struct SearchRange {
  std::size_t min = 2;
  std::size_t max = 12;
};

struct NetworkConfig {
  double sbs_density = 10.0;          // lambda_s, per km^2
  double user_density = 200.0 / 36.0; // lambda, per km^2
  Region region{6.0, 6.0};
  double radius = 0.5;                // R, km
  std::size_t cache_size = 10;        // M, files
  std::size_t catalog_size = 100;     // F, files
  double file_length = 1.0;           // L; carried for completeness, unused by any formula
  SearchRange search_range;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct PopularityProfile {
  std::size_t user_id = 0;
  std::vector<double> probs;
};

using Profiles = std::vector<PopularityProfile>;

/// Checks non-negativity and sum-to-one (within `tolerance`) for each profile,
/// and that all share one catalog size. Returns that catalog size.
std::size_t validate_profiles(std::span<const PopularityProfile> profiles, double tolerance = 1e-9);

struct PlantedScenario {
  /// preferred[c] = files favoured by planted cluster c, most popular first.
  std::vector<std::vector<std::size_t>> preferred;
  double zipf_exponent = 0.0;
  double bias = 0.9;       // beta
  double noise_sd = 0.05;  // sd of the log-normal per-entry multiplier
  /// membership[u] = planted cluster of user u.
  std::vector<std::size_t> membership;

  std::size_t cluster_count() const { return preferred.size(); }
};

/// Planted scenario with `clusters` disjoint, contiguous preferred subsets of
/// `subset_size` files each and users assigned to clusters uniformly at random.
PlantedScenario make_planted_scenario(std::size_t clusters, std::size_t catalog_size,
                                      std::size_t subset_size, double zipf_exponent, double bias,
                                      std::size_t n_users, std::uint64_t seed);

/// User u in planted cluster c gets
///   beta * Zipf(s) over preferred[c] + (1 - beta) * Uniform(catalog),
/// each entry multiplied by exp(N(0, noise_sd^2)), then renormalized.
Profiles generate_profiles(const PlantedScenario& scenario, std::size_t n_users,
                           std::size_t catalog_size, std::uint64_t seed);

/// Element-wise mean of the given profiles.
std::vector<double> mean_profile(std::span<const PopularityProfile> profiles);

/// Indices of the M largest entries of `popularity`, ties to the lowest index.
/// Returned in descending popularity order.
std::vector<std::size_t> top_m(std::span<const double> popularity, std::size_t m);

/// Top-M files of the mean profile over `profiles` (the cluster's cache set).
std::vector<std::size_t> cluster_top_m(std::span<const PopularityProfile> profiles, std::size_t m);

}  // namespace clustercache
