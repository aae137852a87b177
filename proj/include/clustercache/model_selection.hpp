#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clustercache/cluster_model.hpp"
#include "clustercache/network.hpp"

namespace clustercache {

inline constexpr double kVarianceFloor = 1e-12;

enum class LikelihoodForm {
  /// Spherical-Gaussian classification likelihood:
  ///   sum_u -(F/2) log(2 pi s2) - ||P_u - C||^2 / (2 s2) + log(N_k / N_u)
  Standard,
  /// Closed form as printed in the source of the method:
  ///   sum_k -(N_k/2) (log(2 pi) - 1 + 2 log(N_k/N_u) - F log(s2))
  /// Kept for comparison only; it rewards large variances.
  PrintedClosedForm,
};

struct ModelScore {
  std::size_t cluster_count = 0;
  std::size_t parameter_count = 0;  // cluster_count * (F + 1)
  double log_likelihood = 0.0;
  double aic = 0.0;
  double aic_normalized = 0.0;      // aic / N_u
  std::vector<std::size_t> degenerate_clusters;
};

/// (1/N_u) * sum_k N_k * variance_k: the within-cluster variance of the whole model.
double pooled_variance(const ClusterModel& model);

/// Variance used for cluster k in the standard likelihood. A cluster whose own
/// estimate is below kVarianceFloor (a singleton, or identical members) cannot
/// estimate its spread; it borrows the pooled variance instead. The floor
/// applies after that.
double effective_variance(const ClusterModel& model, std::size_t k);

double log_likelihood(const ClusterModel& model, std::span<const PopularityProfile> profiles,
                      LikelihoodForm form = LikelihoodForm::Standard);

ModelScore aic(const ClusterModel& model, std::span<const PopularityProfile> profiles,
               LikelihoodForm form = LikelihoodForm::Standard);

/// Minimal AIC; ties go to the smaller cluster count.
const ModelScore& select_model(std::span<const ModelScore> scores);

}  // namespace clustercache
