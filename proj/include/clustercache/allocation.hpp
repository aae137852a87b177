#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clustercache/network.hpp"

namespace clustercache {

enum class AllocationMethod { ClosedForm, Projected, Numerical, Uniform };

const char* to_string(AllocationMethod method);

/// Share of SBSs assigned to each cluster's cache set.
struct Allocation {
  std::vector<double> fractions;  // x_k >= 0, sum <= 1
  std::vector<double> psi;        // lambda_s * pi * R^2 * mass_k
  double multiplier = 0.0;        // budget multiplier mu at the optimum
  AllocationMethod method = AllocationMethod::ClosedForm;
  std::vector<std::string> warnings;
};

/// sum_u sum_{i in files} p_iu.
double cluster_mass(std::span<const PopularityProfile> profiles, std::span<const std::size_t> files);

/// lambda_s * pi * R^2: expected SBS count in a disk of radius R.
double coverage_load(double sbs_density, double radius);

/// Hit objective (1/N_u) sum_k mass_k (1 - exp(-x_k * load)).
double hit_objective(std::span<const double> masses, std::span<const double> fractions,
                     double sbs_density, double radius, std::size_t n_users = 1);

/// Maximizes hit_objective subject to sum x <= 1 and x >= 0.
///
/// Uses the interior closed form
///   x_s = (N log psi_s - sum_k log psi_k + load) / (N load)
/// when it is non-negative everywhere. Otherwise the most negative component is
/// pinned to zero and the closed form re-solved over the rest until all
/// components are feasible. Zero-mass clusters get x = 0 up front.
Allocation optimize_fractions(std::span<const double> masses, double sbs_density, double radius,
                              std::size_t n_users = 1);

/// x_k = 1/N for every cluster with positive mass.
Allocation uniform_fractions(std::span<const double> masses, double sbs_density, double radius);

}  // namespace clustercache
