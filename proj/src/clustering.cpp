#include "clustercache/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace clustercache {

namespace {

double squared_norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("pearson_correlation: size mismatch");
  }
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return sab / std::sqrt(saa * sbb);
}

double assignment_score(std::span<const double> profile, std::span<const double> centroid) {
  const double r = pearson_correlation(profile, centroid);
  if (std::isnan(r)) {
    return -std::sqrt(squared_norm_diff(profile, centroid));
  }
  return r;
}

std::vector<std::size_t> assign_users(std::span<const PopularityProfile> profiles,
                                      const std::vector<std::vector<double>>& centroids) {
  if (centroids.empty()) {
    throw std::invalid_argument("assign_users: no centroids");
  }
  std::vector<std::size_t> assignment(profiles.size(), 0);
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    const auto& p = profiles[u].probs;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      if (centroids[k].size() != p.size()) {
        throw std::invalid_argument("assign_users: centroid dimension mismatch");
      }
      const double s = assignment_score(p, centroids[k]);
      if (s > best + kAssignTieTolerance) {
        best = s;
        assignment[u] = k;
      }
    }
  }
  return assignment;
}

namespace {

void recompute(std::span<const PopularityProfile> profiles, ClusterModel& model) {
  const std::size_t f = profiles.front().probs.size();
  const std::size_t i = model.cluster_count;
  model.centroids.assign(i, std::vector<double>(f, 0.0));
  model.counts.assign(i, 0);
  model.variances.assign(i, 0.0);
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    const std::size_t k = model.assignment[u];
    ++model.counts[k];
    for (std::size_t j = 0; j < f; ++j) {
      model.centroids[k][j] += profiles[u].probs[j];
    }
  }
  for (std::size_t k = 0; k < i; ++k) {
    if (model.counts[k] == 0) {
      continue;
    }
    for (auto& v : model.centroids[k]) {
      v /= static_cast<double>(model.counts[k]);
    }
  }
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    const std::size_t k = model.assignment[u];
    model.variances[k] += squared_norm_diff(profiles[u].probs, model.centroids[k]);
  }
  for (std::size_t k = 0; k < i; ++k) {
    if (model.counts[k] > 0) {
      model.variances[k] /= static_cast<double>(model.counts[k]);
    }
  }
}

}  // namespace

ClusterModel update_centroids(std::span<const PopularityProfile> profiles,
                              std::vector<std::size_t> assignment, std::size_t cluster_count) {
  if (profiles.empty()) {
    throw std::invalid_argument("update_centroids: no profiles");
  }
  if (assignment.size() != profiles.size()) {
    throw std::invalid_argument("update_centroids: assignment size mismatch");
  }
  if (cluster_count == 0 || cluster_count > profiles.size()) {
    throw std::invalid_argument("update_centroids: need 1 <= clusters <= users");
  }
  for (std::size_t k : assignment) {
    if (k >= cluster_count) {
      throw std::invalid_argument("update_centroids: assignment names an unknown cluster");
    }
  }

  ClusterModel model;
  model.cluster_count = cluster_count;
  model.assignment = std::move(assignment);
  recompute(profiles, model);

  // Empty-cluster repair: hand each empty cluster the user farthest from its
  // own centroid, taken from a cluster that keeps at least one member.
  for (std::size_t k = 0; k < cluster_count; ++k) {
    if (model.counts[k] != 0) {
      continue;
    }
    std::size_t donor_user = profiles.size();
    double farthest = -1.0;
    for (std::size_t u = 0; u < profiles.size(); ++u) {
      const std::size_t owner = model.assignment[u];
      if (model.counts[owner] < 2) {
        continue;
      }
      const double d = squared_norm_diff(profiles[u].probs, model.centroids[owner]);
      if (d > farthest) {
        farthest = d;
        donor_user = u;
      }
    }
    model.assignment[donor_user] = k;
    ++model.empty_repairs;
    recompute(profiles, model);
  }
  return model;
}

double within_cluster_sse(std::span<const PopularityProfile> profiles,
                          std::span<const std::size_t> assignment,
                          const std::vector<std::vector<double>>& centroids) {
  double total = 0.0;
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    total += squared_norm_diff(profiles[u].probs, centroids.at(assignment[u]));
  }
  return total;
}

ClusterModel iterate_to_convergence(std::span<const PopularityProfile> profiles,
                                    std::vector<std::vector<double>> centroids) {
  if (centroids.empty()) {
    throw std::invalid_argument("iterate_to_convergence: no initial centroids");
  }
  const std::size_t i = centroids.size();
  ClusterModel model;
  std::vector<std::size_t> previous;
  std::size_t repairs = 0;
  for (std::size_t it = 0;; ++it) {
    auto assignment = assign_users(profiles, centroids);
    if (it > 0 && assignment == previous) {
      model.converged = true;
      break;
    }
    if (it == kMaxKMeansIterations) {
      model.converged = false;
      break;
    }
    model = update_centroids(profiles, std::move(assignment), i);
    repairs += model.empty_repairs;
    model.iterations = it + 1;
    centroids = model.centroids;
    previous = model.assignment;
  }
  model.empty_repairs = repairs;
  return model;
}

SplitResult split_worst_cluster(const ClusterModel& model,
                                std::span<const PopularityProfile> profiles) {
  if (model.cluster_count == 0 || model.assignment.size() != profiles.size()) {
    throw std::invalid_argument("split_worst_cluster: malformed model");
  }
  SplitResult out;
  out.centroids = model.centroids;

  std::size_t worst = 0;
  bool all_zero = true;
  for (std::size_t k = 0; k < model.cluster_count; ++k) {
    if (model.variances[k] > 0.0) {
      all_zero = false;
    }
    if (model.variances[k] > model.variances[worst]) {
      worst = k;
    }
  }
  if (all_zero) {
    out.degenerate = true;
    worst = static_cast<std::size_t>(
        std::max_element(model.counts.begin(), model.counts.end()) - model.counts.begin());
  }
  out.split_cluster = worst;

  auto is_existing = [&](std::span<const double> v) {
    return std::any_of(out.centroids.begin(), out.centroids.end(),
                       [&](const auto& c) { return std::equal(c.begin(), c.end(), v.begin()); });
  };

  // Farthest member of the worst cluster that is not already a centroid;
  // lower user id wins ties.
  auto farthest_in = [&](auto&& accept_cluster) {
    std::size_t best_user = profiles.size();
    double best = -1.0;
    for (std::size_t u = 0; u < profiles.size(); ++u) {
      const std::size_t k = model.assignment[u];
      if (!accept_cluster(k) || is_existing(profiles[u].probs)) {
        continue;
      }
      const double d = squared_norm_diff(profiles[u].probs, model.centroids[k]);
      if (d > best) {
        best = d;
        best_user = u;
      }
    }
    return best_user;
  };

  std::size_t chosen = farthest_in([&](std::size_t k) { return k == worst; });
  if (chosen == profiles.size()) {
    chosen = farthest_in([](std::size_t) { return true; });
  }
  if (chosen != profiles.size()) {
    out.seed_user = chosen;
    out.centroids.push_back(profiles[chosen].probs);
    return out;
  }

  // Every profile coincides with a centroid: nudge a copy of the worst
  // centroid by moving a sliver of mass between its first two entries.
  out.perturbed = true;
  auto fresh = model.centroids[worst];
  double step = 1e-9;
  do {
    fresh = model.centroids[worst];
    if (fresh.size() >= 2) {
      const double moved = std::min(step, fresh[0]);
      fresh[0] -= moved;
      fresh[1] += moved;
      if (moved == 0.0) {
        fresh[1] -= std::min(step, fresh[1]);
        fresh[0] += step;
      }
    } else {
      fresh[0] += step;
    }
    step *= 2.0;
  } while (is_existing(fresh));
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    if (model.assignment[u] == worst) {
      out.seed_user = u;
      break;
    }
  }
  out.centroids.push_back(std::move(fresh));
  return out;
}

AdaptiveResult adaptive_cluster(std::span<const PopularityProfile> profiles,
                                SearchRange search_range, std::uint64_t seed,
                                const AdaptiveOptions& options) {
  const std::size_t n_users = profiles.size();
  if (search_range.min < 1 || search_range.min > search_range.max) {
    throw std::invalid_argument("adaptive_cluster: need 1 <= min <= max");
  }
  if (search_range.max > n_users) {
    throw std::invalid_argument("adaptive_cluster: search range exceeds the number of users");
  }

  Rng rng(seed);
  std::vector<std::size_t> users(n_users);
  std::iota(users.begin(), users.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  std::sample(users.begin(), users.end(), std::back_inserter(picked), search_range.min, rng);
  std::shuffle(picked.begin(), picked.end(), rng);

  std::vector<std::vector<double>> centroids;
  for (std::size_t u : picked) {
    centroids.push_back(profiles[u].probs);
  }

  AdaptiveResult result;
  std::vector<ClusterModel> models;
  const std::size_t hard_cap = std::min(n_users, 4 * search_range.max);
  std::size_t upper = search_range.max;
  for (std::size_t i = search_range.min;; ++i) {
    ClusterModel model = iterate_to_convergence(profiles, centroids);
    if (!model.converged) {
      result.warnings.push_back("k-means did not converge at " + std::to_string(i) + " clusters");
    }
    result.trace.push_back(aic(model, profiles, options.likelihood));
    models.push_back(model);

    if (i == upper) {
      const bool minimum_at_end = &select_model(result.trace) == &result.trace.back();
      if (!(options.extend_search && minimum_at_end && result.trace.size() > 1)) {
        break;
      }
      if (upper >= hard_cap) {
        result.warnings.push_back("AIC still decreasing at " + std::to_string(upper) +
                                  " clusters; search stopped at the extension cap");
        break;
      }
      upper = std::min(upper + 5, hard_cap);
    }
    centroids = split_worst_cluster(model, profiles).centroids;
  }

  result.searched_max = upper;
  const ModelScore& best = select_model(result.trace);
  const std::size_t idx = static_cast<std::size_t>(&best - result.trace.data());
  result.best = models[idx];
  result.best_score = best;
  return result;
}

}  // namespace clustercache
