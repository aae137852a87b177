#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "clustercache/cluster_model.hpp"
#include "clustercache/model_selection.hpp"
#include "clustercache/network.hpp"

namespace clustercache {

inline constexpr std::size_t kMaxKMeansIterations = 100;

/// Two scores closer than this are treated as tied (lowest index wins).
inline constexpr double kAssignTieTolerance = 1e-12;

/// Pearson correlation, or nullopt-like NaN when either vector is constant.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Score used to attach a user to a centroid: Pearson correlation, falling back
/// to negative Euclidean distance when the correlation is undefined.
double assignment_score(std::span<const double> profile, std::span<const double> centroid);

/// Each user goes to the centroid with the highest assignment_score.
std::vector<std::size_t> assign_users(std::span<const PopularityProfile> profiles,
                                      const std::vector<std::vector<double>>& centroids);

/// Recomputes centroids, counts and variances for `cluster_count` clusters.
/// An empty cluster takes over the user lying farthest from its own centroid
/// (among clusters that can spare one); the returned assignment reflects that.
ClusterModel update_centroids(std::span<const PopularityProfile> profiles,
                              std::vector<std::size_t> assignment, std::size_t cluster_count);

/// Sum of squared distances of users to the given centroids under `assignment`.
double within_cluster_sse(std::span<const PopularityProfile> profiles,
                          std::span<const std::size_t> assignment,
                          const std::vector<std::vector<double>>& centroids);

/// Alternates assign_users / update_centroids until the assignment repeats or
/// kMaxKMeansIterations updates have run (then converged == false).
ClusterModel iterate_to_convergence(std::span<const PopularityProfile> profiles,
                                    std::vector<std::vector<double>> centroids);

struct SplitResult {
  std::vector<std::vector<double>> centroids;  // existing ones plus one new
  std::size_t split_cluster = 0;
  std::size_t seed_user = 0;
  bool degenerate = false;  // every variance was zero
  bool perturbed = false;   // no member differed from the existing centroids
};

/// Adds a centroid at the member farthest from the centroid of the cluster
/// with the largest variance.
SplitResult split_worst_cluster(const ClusterModel& model,
                                std::span<const PopularityProfile> profiles);

struct AdaptiveOptions {
  LikelihoodForm likelihood = LikelihoodForm::Standard;
  /// Extend the search (steps of 5, up to min(N_u, 4 * max)) while the AIC
  /// minimum sits at the upper end of the range.
  bool extend_search = true;
};

struct AdaptiveResult {
  ClusterModel best;
  ModelScore best_score;
  std::vector<ModelScore> trace;
  std::size_t searched_max = 0;
  std::vector<std::string> warnings;
};

/// Grows the model from search_range.min to search_range.max clusters,
/// splitting the worst cluster each step, and returns the AIC-minimal model.
AdaptiveResult adaptive_cluster(std::span<const PopularityProfile> profiles,
                                SearchRange search_range, std::uint64_t seed,
                                const AdaptiveOptions& options = {});

}  // namespace clustercache
