#include "clustercache/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "clustercache/csv_io.hpp"

namespace clustercache {

namespace {

// Sub-seeds for each stage so changing one stage's consumption leaves the
// others untouched.
std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) { return mix64(seed * 16 + stage); }

template <typename F>
auto staged(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Radius:
      return "radius";
    case SweepVariable::SbsDensity:
      return "sbs_density";
    case SweepVariable::CacheSize:
      return "cache_size";
  }
  return "radius";
}

const char* to_string(Schemes s) {
  switch (s) {
    case Schemes::Clustered:
      return "clustered";
    case Schemes::Baseline:
      return "baseline";
    case Schemes::Both:
      return "both";
  }
  return "both";
}

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "radius") return SweepVariable::Radius;
  if (s == "sbs_density") return SweepVariable::SbsDensity;
  if (s == "cache_size") return SweepVariable::CacheSize;
  throw std::invalid_argument("unknown sweep variable '" + s + "'");
}

Schemes parse_schemes(const std::string& s) {
  if (s == "clustered") return Schemes::Clustered;
  if (s == "baseline") return Schemes::Baseline;
  if (s == "both") return Schemes::Both;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

void ExperimentSpec::validate() const {
  network.validate();
  if (sweep_values.empty()) {
    throw std::invalid_argument("experiment: sweep values are empty");
  }
  if (!std::is_sorted(sweep_values.begin(), sweep_values.end())) {
    throw std::invalid_argument("experiment: sweep values must be sorted ascending");
  }
  for (double v : sweep_values) {
    switch (sweep_variable) {
      case SweepVariable::Radius:
        if (!(v > 0.0)) throw std::invalid_argument("experiment: radius values must be > 0");
        break;
      case SweepVariable::SbsDensity:
        if (!(v >= 0.0)) throw std::invalid_argument("experiment: density values must be >= 0");
        break;
      case SweepVariable::CacheSize:
        if (v < 1.0 || v != std::floor(v) || v > static_cast<double>(network.catalog_size)) {
          throw std::invalid_argument("experiment: cache sizes must be integers in [1, F]");
        }
        break;
    }
  }
  if (n_trials < 1) {
    throw std::invalid_argument("experiment: n_trials must be >= 1");
  }
  if (scenario.n_users < network.search_range.max) {
    throw std::invalid_argument("experiment: fewer users than the largest cluster count searched");
  }
}

nlohmann::json to_json(const ExperimentSpec& s) {
  const auto& n = s.network;
  return nlohmann::json{
      {"network",
       {{"sbs_density", n.sbs_density},
        {"user_density", n.user_density},
        {"region", {{"width", n.region.width()}, {"height", n.region.height()}}},
        {"radius", n.radius},
        {"cache_size", n.cache_size},
        {"catalog_size", n.catalog_size},
        {"file_length", n.file_length},
        {"search_range", {{"min", n.search_range.min}, {"max", n.search_range.max}}}}},
      {"scenario",
       {{"n_users", s.scenario.n_users},
        {"planted_clusters", s.scenario.planted_clusters},
        {"subset_size", s.scenario.subset_size},
        {"zipf_exponent", s.scenario.zipf_exponent},
        {"bias", s.scenario.bias},
        {"noise_sd", s.scenario.noise_sd}}},
      {"sweep", {{"variable", to_string(s.sweep_variable)}, {"values", s.sweep_values}}},
      {"n_trials", s.n_trials},
      {"seed", s.seed},
      {"schemes", to_string(s.schemes)},
      {"uniform_fractions", s.uniform_fractions},
      {"paper_exact_likelihood", s.paper_exact_likelihood},
      {"workers", s.workers},
  };
}

ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base) {
  auto take = [](const nlohmann::json& obj, const char* key, auto& field) {
    if (obj.contains(key)) {
      obj.at(key).get_to(field);
    }
  };
  if (j.contains("network")) {
    const auto& n = j.at("network");
    auto& net = base.network;
    take(n, "sbs_density", net.sbs_density);
    take(n, "user_density", net.user_density);
    take(n, "radius", net.radius);
    take(n, "cache_size", net.cache_size);
    take(n, "catalog_size", net.catalog_size);
    take(n, "file_length", net.file_length);
    if (n.contains("region")) {
      double w = net.region.width();
      double h = net.region.height();
      take(n.at("region"), "width", w);
      take(n.at("region"), "height", h);
      net.region = Region(w, h);
    }
    if (n.contains("search_range")) {
      take(n.at("search_range"), "min", net.search_range.min);
      take(n.at("search_range"), "max", net.search_range.max);
    }
  }
  if (j.contains("scenario")) {
    const auto& sc = j.at("scenario");
    take(sc, "n_users", base.scenario.n_users);
    take(sc, "planted_clusters", base.scenario.planted_clusters);
    take(sc, "subset_size", base.scenario.subset_size);
    take(sc, "zipf_exponent", base.scenario.zipf_exponent);
    take(sc, "bias", base.scenario.bias);
    take(sc, "noise_sd", base.scenario.noise_sd);
  }
  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    if (sw.contains("variable")) {
      base.sweep_variable = parse_sweep_variable(sw.at("variable").get<std::string>());
    }
    take(sw, "values", base.sweep_values);
  }
  take(j, "n_trials", base.n_trials);
  take(j, "seed", base.seed);
  if (j.contains("schemes")) {
    base.schemes = parse_schemes(j.at("schemes").get<std::string>());
  }
  take(j, "uniform_fractions", base.uniform_fractions);
  take(j, "paper_exact_likelihood", base.paper_exact_likelihood);
  take(j, "workers", base.workers);
  return base;
}

std::vector<FileSet> cluster_cache_sets(std::span<const PopularityProfile> profiles,
                                        std::span<const std::size_t> assignment,
                                        std::size_t cluster_count, std::size_t cache_size) {
  if (assignment.size() != profiles.size()) {
    throw std::invalid_argument("cache sets: assignment size mismatch");
  }
  std::vector<Profiles> members(cluster_count);
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    if (assignment[u] >= cluster_count) {
      throw std::invalid_argument("cache sets: assignment names an unknown cluster");
    }
    members[assignment[u]].push_back(profiles[u]);
  }
  std::vector<FileSet> sets;
  for (const auto& m : members) {
    if (m.empty()) {
      throw std::invalid_argument("cache sets: empty cluster");
    }
    sets.push_back(cluster_top_m(m, cache_size));
  }
  return sets;
}

Placement place(std::span<const PopularityProfile> profiles, std::span<const std::size_t> assignment,
                std::size_t cluster_count, std::size_t cache_size, double sbs_density, double radius,
                bool uniform) {
  Placement p;
  p.sets = cluster_cache_sets(profiles, assignment, cluster_count, cache_size);
  std::vector<double> masses;
  masses.reserve(p.sets.size());
  for (const auto& s : p.sets) {
    masses.push_back(cluster_mass(profiles, s));
  }
  p.allocation = uniform ? uniform_fractions(masses, sbs_density, radius)
                         : optimize_fractions(masses, sbs_density, radius, profiles.size());
  return p;
}

Profiles generate_for(const ExperimentSpec& spec, PlantedScenario* scenario_out) {
  const auto& sc = spec.scenario;
  PlantedScenario scenario =
      make_planted_scenario(sc.planted_clusters, spec.network.catalog_size, sc.subset_size,
                            sc.zipf_exponent, sc.bias, sc.n_users, stage_seed(spec.seed, 1));
  scenario.noise_sd = sc.noise_sd;
  Profiles profiles =
      generate_profiles(scenario, sc.n_users, spec.network.catalog_size, stage_seed(spec.seed, 2));
  if (scenario_out != nullptr) {
    *scenario_out = std::move(scenario);
  }
  return profiles;
}

std::vector<SweepPoint> sweep(const ExperimentSpec& spec, std::span<const PopularityProfile> profiles,
                              const ClusterModel& model) {
  std::vector<SweepPoint> points;
  for (std::size_t idx = 0; idx < spec.sweep_values.size(); ++idx) {
    const double value = spec.sweep_values[idx];
    SweepPoint pt;
    pt.network = spec.network;
    switch (spec.sweep_variable) {
      case SweepVariable::Radius:
        pt.network.radius = value;
        break;
      case SweepVariable::SbsDensity:
        pt.network.sbs_density = value;
        break;
      case SweepVariable::CacheSize:
        pt.network.cache_size = static_cast<std::size_t>(value);
        break;
    }
    const auto& net = pt.network;

    pt.placement = staged("allocate", [&] {
      return place(profiles, model.assignment, model.cluster_count, net.cache_size,
                   net.sbs_density, net.radius, spec.uniform_fractions);
    });

    staged("evaluate", [&] {
      pt.clustered_analytic = analytic_hit(profiles, pt.placement.sets,
                                           pt.placement.allocation.fractions, net.sbs_density,
                                           net.radius);
      pt.baseline_analytic =
          analytic_hit_baseline(profiles, net.cache_size, net.sbs_density, net.radius);
      MonteCarloOptions mc;
      mc.workers = spec.workers;
      const std::uint64_t mc_seed = stage_seed(spec.seed, 4) + idx;
      if (spec.schemes != Schemes::Baseline) {
        pt.clustered = monte_carlo_hit(net, profiles, pt.placement.sets,
                                       pt.placement.allocation.fractions, spec.n_trials, mc_seed, mc);
      }
      if (spec.schemes != Schemes::Clustered) {
        const std::vector<FileSet> global{cluster_top_m(profiles, net.cache_size)};
        const std::vector<double> whole{1.0};
        pt.baseline = monte_carlo_hit(net, profiles, global, whole, spec.n_trials, mc_seed ^ 1, mc);
      }
      return 0;
    });
    points.push_back(std::move(pt));
  }
  return points;
}

std::string aic_trace_csv(const std::vector<ModelScore>& trace) {
  std::string out = csv::aic_trace_header();
  for (const auto& s : trace) {
    out += csv::aic_trace_row(s);
  }
  return out;
}

std::string allocation_csv(const std::vector<SweepPoint>& points) {
  std::string out = std::string(csv::kAllocationHeader) + "\n";
  for (const auto& pt : points) {
    out += csv::allocation_rows(pt.network.radius, pt.network.sbs_density, pt.network.cache_size,
                                pt.placement.allocation);
  }
  return out;
}

std::string hits_csv(const std::vector<SweepPoint>& points, Schemes schemes) {
  std::string out = std::string(csv::kHitsHeader) + "\n";
  for (const auto& pt : points) {
    const auto& n = pt.network;
    if (schemes != Schemes::Baseline) {
      out += csv::hits_row(n.radius, n.sbs_density, n.cache_size, "clustered", pt.clustered);
    }
    if (schemes != Schemes::Clustered) {
      out += csv::hits_row(n.radius, n.sbs_density, n.cache_size, "baseline", pt.baseline);
    }
  }
  return out;
}

RunArtifacts run_pipeline(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  staged("config", [&] {
    spec.validate();
    return 0;
  });

  RunArtifacts run;
  run.profiles = staged("generate", [&] { return generate_for(spec, &run.scenario); });

  run.clustering = staged("cluster", [&] {
    AdaptiveOptions opts;
    opts.likelihood =
        spec.paper_exact_likelihood ? LikelihoodForm::PrintedClosedForm : LikelihoodForm::Standard;
    return adaptive_cluster(run.profiles, spec.network.search_range, stage_seed(spec.seed, 3), opts);
  });

  run.points = sweep(spec, run.profiles, run.clustering.best);

  if (!out_dir.empty()) {
    staged("write", [&] {
      const std::vector<std::pair<std::string, std::string>> outputs{
          {"aic_trace.csv", aic_trace_csv(run.clustering.trace)},
          {"clusters.csv", csv::clusters_csv(run.profiles, run.clustering.best.assignment)},
          {"centroids.csv", csv::centroids_csv(run.clustering.best)},
          {"allocation.csv", allocation_csv(run.points)},
          {"hits.csv", hits_csv(run.points, spec.schemes)},
      };
      for (const auto& [name, text] : outputs) {
        csv::write_text(out_dir / name, text);
        run.files.push_back(out_dir / name);
      }
      return 0;
    });
  }
  return run;
}

}  // namespace clustercache
