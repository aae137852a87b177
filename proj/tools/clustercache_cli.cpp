// clustercache: generate profiles, cluster users, allocate SBS fractions and
// evaluate hit probability from the command line.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "clustercache/csv_io.hpp"
#include "clustercache/experiments.hpp"

namespace fs = std::filesystem;
using namespace clustercache;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> config;
  std::string out_dir = ".";
  bool print_config = false;

  std::optional<double> radius;
  std::optional<double> sbs_density;
  std::optional<double> user_density;
  std::optional<double> width;
  std::optional<double> height;
  std::optional<std::size_t> cache_size;
  std::optional<std::size_t> catalog_size;
  std::optional<std::size_t> nc_min;
  std::optional<std::size_t> nc_max;
  bool paper_scale = false;

  std::optional<std::size_t> n_users;
  std::optional<std::size_t> planted_clusters;
  std::optional<std::size_t> subset_size;
  std::optional<double> zipf;
  std::optional<double> bias;
  std::optional<double> noise_sd;

  std::optional<std::string> sweep_variable;
  std::optional<std::vector<double>> sweep_values;
  std::optional<std::size_t> n_trials;
  std::optional<std::string> schemes;
  std::optional<std::size_t> workers;
  bool uniform_fractions = false;
  bool paper_exact_likelihood = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base RNG seed");
  cmd->add_option("--config", o.config, "JSON config file; flags override its keys")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "Directory for CSV outputs");
  cmd->add_flag("--print-config", o.print_config, "Print the resolved config as JSON and exit");

  cmd->add_option("--radius", o.radius, "Service radius R (km)");
  cmd->add_option("--sbs-density", o.sbs_density, "SBS density lambda_s (per km^2)");
  cmd->add_option("--user-density", o.user_density, "User density lambda (per km^2)");
  cmd->add_option("--width", o.width, "Region width (km)");
  cmd->add_option("--height", o.height, "Region height (km)");
  cmd->add_option("--cache-size", o.cache_size, "Files per SBS cache (M)");
  cmd->add_option("--catalog-size", o.catalog_size, "Catalog size (F)");
  cmd->add_option("--nc-min", o.nc_min, "Smallest cluster count searched");
  cmd->add_option("--nc-max", o.nc_max, "Largest cluster count searched");
  cmd->add_flag("--paper-scale", o.paper_scale, "Search cluster counts 5..50");

  cmd->add_option("--n-users", o.n_users, "Number of users with profiles");
  cmd->add_option("--planted-clusters", o.planted_clusters, "Planted preference groups");
  cmd->add_option("--subset-size", o.subset_size, "Preferred files per planted group");
  cmd->add_option("--zipf", o.zipf, "Zipf exponent inside a preferred subset");
  cmd->add_option("--bias", o.bias, "Weight on the preferred subset, in [0, 1]");
  cmd->add_option("--noise-sd", o.noise_sd, "Per-entry log-normal noise sd");

  cmd->add_option("--sweep-variable", o.sweep_variable, "radius | sbs_density | cache_size");
  cmd->add_option("--sweep-values", o.sweep_values, "Ascending sweep values")->delimiter(',');
  cmd->add_option("--n-trials", o.n_trials, "Monte Carlo spatial realizations per point");
  cmd->add_option("--schemes", o.schemes, "clustered | baseline | both");
  cmd->add_option("--workers", o.workers, "Monte Carlo worker threads (0 = all cores)");
  cmd->add_flag("--uniform-fractions", o.uniform_fractions, "Use x_k = 1/N_c instead of optimizing");
  cmd->add_flag("--paper-exact-likelihood", o.paper_exact_likelihood,
                "Score models with the printed closed-form log-likelihood");
}

ExperimentSpec resolve(const Overrides& o) {
  ExperimentSpec spec;
  if (o.config) {
    std::ifstream in(*o.config);
    spec = spec_from_json(nlohmann::json::parse(in), spec);
  }
  auto& n = spec.network;
  if (o.seed) spec.seed = *o.seed;
  if (o.radius) n.radius = *o.radius;
  if (o.sbs_density) n.sbs_density = *o.sbs_density;
  if (o.user_density) n.user_density = *o.user_density;
  if (o.width || o.height) n.region = Region(o.width.value_or(n.region.width()), o.height.value_or(n.region.height()));
  if (o.cache_size) n.cache_size = *o.cache_size;
  if (o.catalog_size) n.catalog_size = *o.catalog_size;
  if (o.paper_scale) n.search_range = {5, 50};
  if (o.nc_min) n.search_range.min = *o.nc_min;
  if (o.nc_max) n.search_range.max = *o.nc_max;
  auto& s = spec.scenario;
  if (o.n_users) s.n_users = *o.n_users;
  if (o.planted_clusters) s.planted_clusters = *o.planted_clusters;
  if (o.subset_size) s.subset_size = *o.subset_size;
  if (o.zipf) s.zipf_exponent = *o.zipf;
  if (o.bias) s.bias = *o.bias;
  if (o.noise_sd) s.noise_sd = *o.noise_sd;
  if (o.sweep_variable) spec.sweep_variable = parse_sweep_variable(*o.sweep_variable);
  if (o.sweep_values) spec.sweep_values = *o.sweep_values;
  if (o.n_trials) spec.n_trials = *o.n_trials;
  if (o.schemes) spec.schemes = parse_schemes(*o.schemes);
  if (o.workers) spec.workers = *o.workers;
  if (o.uniform_fractions) spec.uniform_fractions = true;
  if (o.paper_exact_likelihood) spec.paper_exact_likelihood = true;
  return spec;
}

ClusterModel model_from_assignment(const Profiles& profiles, std::vector<std::size_t> assignment) {
  std::size_t clusters = 0;
  for (std::size_t k : assignment) clusters = std::max(clusters, k + 1);
  return update_centroids(profiles, std::move(assignment), clusters);
}

template <typename F>
void stage(const char* name, F&& body) {
  try {
    body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered proactive caching for small-cell networks"};
  app.require_subcommand(1);

  Overrides o;
  std::string profiles_path;
  std::string clusters_path;
  std::string allocation_path;

  auto* generate = app.add_subcommand("generate", "Synthesize planted popularity profiles");
  auto* cluster = app.add_subcommand("cluster", "AIC-driven adaptive clustering of profiles");
  auto* allocate = app.add_subcommand("allocate", "Optimize SBS fractions for a clustering");
  auto* evaluate = app.add_subcommand("evaluate", "Analytic and Monte Carlo hit probability");
  auto* sweep_cmd = app.add_subcommand("sweep", "Full pipeline over a parameter sweep");
  for (auto* cmd : {generate, cluster, allocate, evaluate, sweep_cmd}) {
    add_common(cmd, o);
  }
  for (auto* cmd : {cluster, allocate, evaluate}) {
    cmd->add_option("--profiles", profiles_path, "profiles.csv")->required()->check(CLI::ExistingFile);
  }
  for (auto* cmd : {allocate, evaluate}) {
    cmd->add_option("--clusters", clusters_path, "clusters.csv")->required()->check(CLI::ExistingFile);
  }
  evaluate->add_option("--allocation", allocation_path, "allocation.csv (optimized if omitted)")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentSpec spec;
    stage("config", [&] { spec = resolve(o); });
    if (o.print_config) {
      std::cout << to_json(spec).dump(2) << '\n';
      return 0;
    }
    stage("config", [&] { spec.validate(); });
    const fs::path out = o.out_dir;
    const auto& net = spec.network;

    if (generate->parsed()) {
      PlantedScenario scenario;
      Profiles profiles;
      stage("generate", [&] { profiles = generate_for(spec, &scenario); });
      stage("write", [&] {
        csv::write_text(out / "profiles.csv", csv::profiles_csv(profiles));
        csv::write_text(out / "planted.csv", csv::planted_csv(scenario.membership));
      });
    } else if (cluster->parsed()) {
      Profiles profiles;
      stage("read", [&] { profiles = csv::read_profiles(profiles_path); });
      AdaptiveResult result;
      stage("cluster", [&] {
        AdaptiveOptions opts;
        opts.likelihood =
            spec.paper_exact_likelihood ? LikelihoodForm::PrintedClosedForm : LikelihoodForm::Standard;
        result = adaptive_cluster(profiles, net.search_range, spec.seed, opts);
      });
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      stage("write", [&] {
        csv::write_text(out / "clusters.csv", csv::clusters_csv(profiles, result.best.assignment));
        csv::write_text(out / "centroids.csv", csv::centroids_csv(result.best));
        csv::write_text(out / "aic_trace.csv", aic_trace_csv(result.trace));
      });
      std::cout << "selected " << result.best.cluster_count << " clusters\n";
    } else if (allocate->parsed() || evaluate->parsed()) {
      Profiles profiles;
      ClusterModel model;
      stage("read", [&] {
        profiles = csv::read_profiles(profiles_path);
        model = model_from_assignment(profiles, csv::read_clusters(clusters_path, profiles));
      });
      Placement placement;
      stage("allocate", [&] {
        placement = place(profiles, model.assignment, model.cluster_count, net.cache_size,
                          net.sbs_density, net.radius, spec.uniform_fractions);
      });
      for (const auto& w : placement.allocation.warnings) std::cerr << "warning: " << w << '\n';

      if (allocate->parsed()) {
        stage("write", [&] {
          csv::write_text(out / "allocation.csv",
                          std::string(csv::kAllocationHeader) + "\n" +
                              csv::allocation_rows(net.radius, net.sbs_density, net.cache_size,
                                                   placement.allocation));
        });
        return 0;
      }

      if (!allocation_path.empty()) {
        stage("read", [&] {
          std::vector<double> fractions(model.cluster_count, 0.0);
          std::vector<bool> seen(model.cluster_count, false);
          for (const auto& row : csv::read_allocation(allocation_path)) {
            if (row.radius != net.radius || row.sbs_density != net.sbs_density ||
                row.cache_size != net.cache_size) {
              continue;
            }
            if (row.cluster_id >= model.cluster_count) {
              throw std::runtime_error("allocation names an unknown cluster");
            }
            fractions[row.cluster_id] = row.fraction;
            seen[row.cluster_id] = true;
          }
          if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw std::runtime_error("allocation has no complete row set for R=" +
                                     csv::format_double(net.radius) + ", lambda_s=" +
                                     csv::format_double(net.sbs_density) +
                                     ", M=" + std::to_string(net.cache_size));
          }
          placement.allocation.fractions = std::move(fractions);
        });
      }

      std::string rows = std::string(csv::kHitsHeader) + "\n";
      stage("evaluate", [&] {
        MonteCarloOptions mc;
        mc.workers = spec.workers;
        if (spec.schemes != Schemes::Baseline) {
          const auto report = monte_carlo_hit(net, profiles, placement.sets,
                                              placement.allocation.fractions, spec.n_trials,
                                              spec.seed, mc);
          rows += csv::hits_row(net.radius, net.sbs_density, net.cache_size, "clustered", report);
        }
        if (spec.schemes != Schemes::Clustered) {
          const std::vector<FileSet> global{cluster_top_m(profiles, net.cache_size)};
          const std::vector<double> whole{1.0};
          const auto report =
              monte_carlo_hit(net, profiles, global, whole, spec.n_trials, spec.seed ^ 1, mc);
          rows += csv::hits_row(net.radius, net.sbs_density, net.cache_size, "baseline", report);
        }
      });
      stage("write", [&] { csv::write_text(out / "hits.csv", rows); });
    } else if (sweep_cmd->parsed()) {
      const auto run = run_pipeline(spec, out);
      for (const auto& w : run.clustering.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << "selected " << run.clustering.best.cluster_count << " clusters; wrote "
                << run.files.size() << " files to " << out.string() << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "error " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error " << e.what() << '\n';
    return 1;
  }
  return 0;
}
