#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "clustercache/allocation.hpp"
#include "clustercache/cluster_model.hpp"
#include "clustercache/hit_model.hpp"
#include "clustercache/model_selection.hpp"
#include "clustercache/network.hpp"

// CSV schemas (header rows are fixed):
//   profiles.csv    user_id,0,1,...,F-1
//   planted.csv     user_id,planted_cluster
//   clusters.csv    user_id,cluster_id
//   centroids.csv   cluster_id,0,1,...,F-1
//   aic_trace.csv   cluster_count,k_i,log_likelihood,aic,aic_normalized
//   allocation.csv  R,lambda_s,M,cluster_id,psi,fraction,method
//   hits.csv        R,lambda_s,M,scheme,analytic,mc_estimate,mc_halfwidth,n_trials,overlap_warning
namespace clustercache::csv {

inline constexpr const char* kAicTraceHeader = "cluster_count,k_i,log_likelihood,aic,aic_normalized";
inline constexpr const char* kAllocationHeader = "R,lambda_s,M,cluster_id,psi,fraction,method";
inline constexpr const char* kHitsHeader =
    "R,lambda_s,M,scheme,analytic,mc_estimate,mc_halfwidth,n_trials,overlap_warning";

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};

Table read_table(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string profiles_csv(const Profiles& profiles);
Profiles read_profiles(const std::filesystem::path& path);

std::string planted_csv(const std::vector<std::size_t>& membership);

std::string clusters_csv(const Profiles& profiles, const std::vector<std::size_t>& assignment);
/// Returns assignment indexed like the profile rows.
std::vector<std::size_t> read_clusters(const std::filesystem::path& path, const Profiles& profiles);

std::string centroids_csv(const ClusterModel& model);

std::string aic_trace_header();
std::string aic_trace_row(const ModelScore& score);

struct AllocationRow {
  double radius = 0.0;
  double sbs_density = 0.0;
  std::size_t cache_size = 0;
  std::size_t cluster_id = 0;
  double psi = 0.0;
  double fraction = 0.0;
  std::string method;
};

std::string allocation_rows(double radius, double sbs_density, std::size_t cache_size,
                            const Allocation& allocation);
std::vector<AllocationRow> read_allocation(const std::filesystem::path& path);

std::string hits_row(double radius, double sbs_density, std::size_t cache_size,
                     const std::string& scheme, const HitReport& report);

}  // namespace clustercache::csv
