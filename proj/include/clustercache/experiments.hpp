#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clustercache/allocation.hpp"
#include "clustercache/clustering.hpp"
#include "clustercache/hit_model.hpp"
#include "clustercache/network.hpp"

namespace clustercache {

/// Failure inside one pipeline stage; what() is prefixed with "[stage] ".
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("[" + stage + "] " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class SweepVariable { Radius, SbsDensity, CacheSize };
enum class Schemes { Clustered, Baseline, Both };

struct ScenarioParams {
  std::size_t n_users = 200;
  std::size_t planted_clusters = 4;
  std::size_t subset_size = 25;
  double zipf_exponent = 0.0;
  double bias = 0.9;
  double noise_sd = 0.05;
};

struct ExperimentSpec {
  NetworkConfig network;
  ScenarioParams scenario;
  SweepVariable sweep_variable = SweepVariable::Radius;
  std::vector<double> sweep_values{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t n_trials = 100;
  std::uint64_t seed = 1;
  Schemes schemes = Schemes::Both;
  bool uniform_fractions = false;
  bool paper_exact_likelihood = false;
  std::size_t workers = 0;

  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
/// Keys present in `j` override the corresponding fields of `base`.
ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base = {});

const char* to_string(SweepVariable v);
const char* to_string(Schemes s);
SweepVariable parse_sweep_variable(const std::string& s);
Schemes parse_schemes(const std::string& s);

/// Top-M cache set of every cluster (cluster k -> files).
std::vector<FileSet> cluster_cache_sets(std::span<const PopularityProfile> profiles,
                                        std::span<const std::size_t> assignment,
                                        std::size_t cluster_count, std::size_t cache_size);

struct Placement {
  std::vector<FileSet> sets;
  Allocation allocation;
};

/// Cache sets plus SBS fractions for a clustering at one parameter point.
Placement place(std::span<const PopularityProfile> profiles, std::span<const std::size_t> assignment,
                std::size_t cluster_count, std::size_t cache_size, double sbs_density, double radius,
                bool uniform);

struct SweepPoint {
  NetworkConfig network;  // resolved parameters of this point
  Placement placement;
  AnalyticHit clustered_analytic;
  double baseline_analytic = 0.0;
  HitReport clustered;  // filled when the scheme includes clustered
  HitReport baseline;   // filled when the scheme includes baseline
};

struct RunArtifacts {
  Profiles profiles;
  PlantedScenario scenario;
  AdaptiveResult clustering;
  std::vector<SweepPoint> points;
  std::vector<std::filesystem::path> files;
};

Profiles generate_for(const ExperimentSpec& spec, PlantedScenario* scenario_out = nullptr);

/// Evaluates every sweep value against an existing clustering. Clustering is
/// radius-independent; placement and hit evaluation are redone per point.
std::vector<SweepPoint> sweep(const ExperimentSpec& spec, std::span<const PopularityProfile> profiles,
                              const ClusterModel& model);

/// generate -> cluster -> select -> allocate -> evaluate. Writes
/// aic_trace.csv, clusters.csv, centroids.csv, allocation.csv and hits.csv
/// into out_dir when it is non-empty.
RunArtifacts run_pipeline(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

/// CSV text for sweep results.
std::string allocation_csv(const std::vector<SweepPoint>& points);
std::string hits_csv(const std::vector<SweepPoint>& points, Schemes schemes);
std::string aic_trace_csv(const std::vector<ModelScore>& trace);

}  // namespace clustercache
