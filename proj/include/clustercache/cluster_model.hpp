#pragma once

#include <cstddef>
#include <vector>

namespace clustercache {

/// Hard partition of users with per-cluster spherical-Gaussian statistics.
///
/// Invariants: sum(counts) == assignment.size(), every count >= 1,
/// centroids[k] is the mean of its members and
/// variances[k] = (1/N_k) * sum_{u in k} ||P_u - centroid_k||^2.
struct ClusterModel {
  std::size_t cluster_count = 0;
  std::vector<std::size_t> assignment;         // user index -> cluster
  std::vector<std::vector<double>> centroids;  // cluster -> F-vector
  std::vector<std::size_t> counts;
  std::vector<double> variances;

  // Diagnostics from the run that produced the model.
  std::size_t iterations = 0;
  bool converged = true;
  std::size_t empty_repairs = 0;
};

}  // namespace clustercache
