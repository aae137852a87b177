#include "clustercache/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace clustercache {

void NetworkConfig::validate() const {
  if (!(sbs_density >= 0.0) || !(user_density >= 0.0)) {
    throw std::invalid_argument("network: densities must be >= 0");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("network: radius must be > 0");
  }
  if (cache_size < 1 || cache_size > catalog_size) {
    throw std::invalid_argument("network: need 1 <= cache_size <= catalog_size");
  }
  if (search_range.min < 2 || search_range.min > search_range.max) {
    throw std::invalid_argument("network: need 2 <= search_range.min <= search_range.max");
  }
}

std::size_t validate_profiles(std::span<const PopularityProfile> profiles, double tolerance) {
  if (profiles.empty()) {
    throw std::invalid_argument("profiles: empty profile list");
  }
  const std::size_t f = profiles.front().probs.size();
  if (f == 0) {
    throw std::invalid_argument("profiles: empty catalog");
  }
  for (const auto& p : profiles) {
    if (p.probs.size() != f) {
      throw std::invalid_argument("profiles: user " + std::to_string(p.user_id) +
                                  " has a different catalog size");
    }
    double sum = 0.0;
    for (double v : p.probs) {
      if (!(v >= 0.0)) {
        throw std::invalid_argument("profiles: user " + std::to_string(p.user_id) +
                                    " has a negative or NaN entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tolerance) {
      throw std::invalid_argument("profiles: user " + std::to_string(p.user_id) +
                                  " does not sum to 1");
    }
  }
  return f;
}

PlantedScenario make_planted_scenario(std::size_t clusters, std::size_t catalog_size,
                                      std::size_t subset_size, double zipf_exponent, double bias,
                                      std::size_t n_users, std::uint64_t seed) {
  if (clusters == 0 || subset_size == 0 || clusters * subset_size > catalog_size) {
    throw std::invalid_argument("planted scenario: disjoint subsets do not fit in the catalog");
  }
  PlantedScenario s;
  s.zipf_exponent = zipf_exponent;
  s.bias = bias;
  s.preferred.resize(clusters);
  for (std::size_t c = 0; c < clusters; ++c) {
    s.preferred[c].resize(subset_size);
    std::iota(s.preferred[c].begin(), s.preferred[c].end(), c * subset_size);
  }
  Rng rng(mix64(seed ^ 0x706c616e746564ULL));
  std::uniform_int_distribution<std::size_t> pick(0, clusters - 1);
  s.membership.resize(n_users);
  for (auto& m : s.membership) {
    m = pick(rng);
  }
  return s;
}

Profiles generate_profiles(const PlantedScenario& scenario, std::size_t n_users,
                           std::size_t catalog_size, std::uint64_t seed) {
  if (n_users < 1 || catalog_size < 1) {
    throw std::invalid_argument("generate_profiles: need at least one user and one file");
  }
  if (!(scenario.bias >= 0.0 && scenario.bias <= 1.0)) {
    throw std::invalid_argument("generate_profiles: bias must lie in [0, 1]");
  }
  if (scenario.preferred.empty()) {
    throw std::invalid_argument("generate_profiles: no planted clusters");
  }
  if (!(scenario.noise_sd >= 0.0)) {
    throw std::invalid_argument("generate_profiles: negative noise sd");
  }
  if (scenario.membership.size() != n_users) {
    throw std::invalid_argument("generate_profiles: membership size differs from n_users");
  }

  std::vector<std::vector<double>> base(scenario.cluster_count(),
                                        std::vector<double>(catalog_size, 0.0));
  for (std::size_t c = 0; c < scenario.cluster_count(); ++c) {
    const auto& subset = scenario.preferred[c];
    if (subset.empty()) {
      throw std::invalid_argument("generate_profiles: empty preferred subset");
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < subset.size(); ++r) {
      norm += std::pow(static_cast<double>(r + 1), -scenario.zipf_exponent);
    }
    for (std::size_t r = 0; r < subset.size(); ++r) {
      if (subset[r] >= catalog_size) {
        throw std::invalid_argument("generate_profiles: preferred file outside the catalog");
      }
      base[c][subset[r]] +=
          scenario.bias * std::pow(static_cast<double>(r + 1), -scenario.zipf_exponent) / norm;
    }
    for (auto& v : base[c]) {
      v += (1.0 - scenario.bias) / static_cast<double>(catalog_size);
    }
  }

  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, scenario.noise_sd);
  Profiles out(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    const std::size_t c = scenario.membership[u];
    if (c >= scenario.cluster_count()) {
      throw std::invalid_argument("generate_profiles: membership names an unknown cluster");
    }
    out[u].user_id = u;
    out[u].probs = base[c];
    if (scenario.noise_sd > 0.0) {
      for (auto& v : out[u].probs) {
        v *= std::exp(noise(rng));
      }
    }
    const double sum = std::accumulate(out[u].probs.begin(), out[u].probs.end(), 0.0);
    for (auto& v : out[u].probs) {
      v /= sum;
    }
  }
  return out;
}

std::vector<double> mean_profile(std::span<const PopularityProfile> profiles) {
  if (profiles.empty()) {
    throw std::invalid_argument("mean_profile: empty profile list");
  }
  std::vector<double> mean(profiles.front().probs.size(), 0.0);
  for (const auto& p : profiles) {
    if (p.probs.size() != mean.size()) {
      throw std::invalid_argument("mean_profile: catalog size mismatch");
    }
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += p.probs[i];
    }
  }
  for (auto& v : mean) {
    v /= static_cast<double>(profiles.size());
  }
  return mean;
}

std::vector<std::size_t> top_m(std::span<const double> popularity, std::size_t m) {
  if (m > popularity.size()) {
    throw std::invalid_argument("top_m: M exceeds the catalog size");
  }
  std::vector<std::size_t> order(popularity.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (popularity[a] != popularity[b]) {
                        return popularity[a] > popularity[b];
                      }
                      return a < b;
                    });
  order.resize(m);
  return order;
}

std::vector<std::size_t> cluster_top_m(std::span<const PopularityProfile> profiles, std::size_t m) {
  const auto mean = mean_profile(profiles);
  return top_m(mean, m);
}

}  // namespace clustercache
