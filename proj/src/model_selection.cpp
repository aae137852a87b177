#include "clustercache/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clustercache {

namespace {

void check_model(const ClusterModel& model, std::span<const PopularityProfile> profiles) {
  if (profiles.empty()) {
    throw std::invalid_argument("likelihood: no profiles");
  }
  if (model.assignment.size() != profiles.size()) {
    throw std::invalid_argument("likelihood: model covers a different number of users");
  }
  const std::size_t i = model.cluster_count;
  if (i == 0 || model.centroids.size() != i || model.counts.size() != i ||
      model.variances.size() != i) {
    throw std::invalid_argument("likelihood: malformed cluster model");
  }
  const std::size_t f = profiles.front().probs.size();
  for (const auto& c : model.centroids) {
    if (c.size() != f) {
      throw std::invalid_argument("likelihood: centroid and profile catalog sizes differ");
    }
  }
  for (const auto& p : profiles) {
    if (p.probs.size() != f) {
      throw std::invalid_argument("likelihood: profiles have mixed catalog sizes");
    }
  }
  for (std::size_t n : model.counts) {
    if (n == 0) {
      throw std::invalid_argument("likelihood: empty cluster");
    }
  }
}

}  // namespace

double pooled_variance(const ClusterModel& model) {
  double sse = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < model.cluster_count; ++k) {
    sse += static_cast<double>(model.counts[k]) * model.variances[k];
    n += model.counts[k];
  }
  return n == 0 ? 0.0 : sse / static_cast<double>(n);
}

double effective_variance(const ClusterModel& model, std::size_t k) {
  double s2 = model.variances.at(k);
  if (s2 < kVarianceFloor) {
    s2 = pooled_variance(model);
  }
  return std::max(s2, kVarianceFloor);
}

double log_likelihood(const ClusterModel& model, std::span<const PopularityProfile> profiles,
                      LikelihoodForm form) {
  check_model(model, profiles);
  const double f = static_cast<double>(profiles.front().probs.size());
  const double n_users = static_cast<double>(profiles.size());
  const double log_2pi = std::log(2.0 * std::numbers::pi);

  double total = 0.0;
  for (std::size_t k = 0; k < model.cluster_count; ++k) {
    const double nk = static_cast<double>(model.counts[k]);
    const double raw = model.variances[k];
    const double s2 = form == LikelihoodForm::Standard ? effective_variance(model, k)
                                                       : std::max(raw, kVarianceFloor);
    const double log_weight = std::log(nk / n_users);
    if (form == LikelihoodForm::Standard) {
      // sum over members of ||P_u - C_k||^2 is N_k * raw by definition of raw.
      total += -0.5 * nk * f * (log_2pi + std::log(s2)) - nk * raw / (2.0 * s2) + nk * log_weight;
    } else {
      total += -0.5 * nk * (log_2pi - 1.0 + 2.0 * log_weight - f * std::log(s2));
    }
  }
  return total;
}

ModelScore aic(const ClusterModel& model, std::span<const PopularityProfile> profiles,
               LikelihoodForm form) {
  ModelScore score;
  score.cluster_count = model.cluster_count;
  score.log_likelihood = log_likelihood(model, profiles, form);
  const std::size_t f = profiles.front().probs.size();
  score.parameter_count = model.cluster_count * (f + 1);
  score.aic = 2.0 * static_cast<double>(score.parameter_count) - 2.0 * score.log_likelihood;
  score.aic_normalized = score.aic / static_cast<double>(profiles.size());
  for (std::size_t k = 0; k < model.cluster_count; ++k) {
    if (model.variances[k] < kVarianceFloor) {
      score.degenerate_clusters.push_back(k);
    }
  }
  return score;
}

const ModelScore& select_model(std::span<const ModelScore> scores) {
  if (scores.empty()) {
    throw std::invalid_argument("select_model: no scores");
  }
  const ModelScore* best = &scores.front();
  for (const auto& s : scores) {
    if (s.aic < best->aic || (s.aic == best->aic && s.cluster_count < best->cluster_count)) {
      best = &s;
    }
  }
  return *best;
}

}  // namespace clustercache
