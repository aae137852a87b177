#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "clustercache/experiments.hpp"

namespace py = pybind11;
using namespace clustercache;

namespace {

Profiles to_profiles(const std::vector<std::vector<double>>& rows) {
  Profiles out(rows.size());
  for (std::size_t u = 0; u < rows.size(); ++u) out[u] = {u, rows[u]};
  return out;
}

std::vector<std::vector<double>> from_profiles(const Profiles& profiles) {
  std::vector<std::vector<double>> rows;
  rows.reserve(profiles.size());
  for (const auto& p : profiles) rows.push_back(p.probs);
  return rows;
}

ExperimentSpec spec_from(const std::string& config_json) {
  if (config_json.empty()) return {};
  return spec_from_json(nlohmann::json::parse(config_json));
}

py::dict score_dict(const ModelScore& s) {
  py::dict d;
  d["cluster_count"] = s.cluster_count;
  d["k_i"] = s.parameter_count;
  d["log_likelihood"] = s.log_likelihood;
  d["aic"] = s.aic;
  d["aic_normalized"] = s.aic_normalized;
  return d;
}

}  // namespace

PYBIND11_MODULE(_clustercache, m) {
  py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);

  m.def("resolved_config", [](const std::string& config_json) {
    const auto spec = spec_from(config_json);
    spec.validate();
    return to_json(spec).dump();
  }, py::arg("config_json") = "");

  m.def("generate", [](const std::string& config_json) {
    PlantedScenario scenario;
    const auto profiles = generate_for(spec_from(config_json), &scenario);
    return py::make_tuple(from_profiles(profiles), scenario.membership);
  }, py::arg("config_json") = "");

  m.def("adaptive_cluster", [](const std::vector<std::vector<double>>& rows, std::size_t nc_min,
                               std::size_t nc_max, std::uint64_t seed) {
    const auto r = adaptive_cluster(to_profiles(rows), {nc_min, nc_max}, seed);
    py::dict d;
    d["cluster_count"] = r.best.cluster_count;
    d["assignment"] = r.best.assignment;
    d["centroids"] = r.best.centroids;
    py::list trace;
    for (const auto& s : r.trace) trace.append(score_dict(s));
    d["trace"] = trace;
    d["warnings"] = r.warnings;
    return d;
  }, py::arg("profiles"), py::arg("nc_min") = 2, py::arg("nc_max") = 12, py::arg("seed") = 1);

  m.def("optimize_fractions", [](const std::vector<double>& masses, double sbs_density, double radius,
                                 std::size_t n_users) {
    const auto a = optimize_fractions(masses, sbs_density, radius, n_users);
    py::dict d;
    d["fractions"] = a.fractions;
    d["psi"] = a.psi;
    d["multiplier"] = a.multiplier;
    d["method"] = to_string(a.method);
    return d;
  }, py::arg("masses"), py::arg("sbs_density"), py::arg("radius"), py::arg("n_users") = 1);

  m.def("analytic_hit", [](const std::vector<std::vector<double>>& rows, const std::vector<FileSet>& sets,
                           const std::vector<double>& fractions, double sbs_density, double radius) {
    const auto h = analytic_hit(to_profiles(rows), sets, fractions, sbs_density, radius);
    py::dict d;
    d["probability"] = h.probability;
    d["exact"] = h.exact;
    d["overlap_warning"] = h.overlap_warning;
    return d;
  }, py::arg("profiles"), py::arg("sets"), py::arg("fractions"), py::arg("sbs_density"), py::arg("radius"));

  m.def("analytic_hit_baseline", [](const std::vector<std::vector<double>>& rows, std::size_t cache_size,
                                    double sbs_density, double radius) {
    return analytic_hit_baseline(to_profiles(rows), cache_size, sbs_density, radius);
  }, py::arg("profiles"), py::arg("cache_size"), py::arg("sbs_density"), py::arg("radius"));

  m.def("monte_carlo_hit", [](const std::vector<std::vector<double>>& rows, const std::vector<FileSet>& sets,
                              const std::vector<double>& fractions, std::size_t n_trials, std::uint64_t seed,
                              const std::string& config_json) {
    const auto spec = spec_from(config_json);
    const auto r = [&] {
      py::gil_scoped_release release;
      return monte_carlo_hit(spec.network, to_profiles(rows), sets, fractions, n_trials, seed);
    }();
    py::dict d;
    d["analytic"] = r.analytic;
    d["mc_estimate"] = r.mc_estimate;
    d["mc_halfwidth"] = r.mc_halfwidth_95;
    d["n_trials"] = r.n_trials;
    d["n_requests"] = r.n_requests;
    return d;
  }, py::arg("profiles"), py::arg("sets"), py::arg("fractions"), py::arg("n_trials"), py::arg("seed"),
     py::arg("config_json") = "");

  m.def("run_pipeline", [](const std::string& config_json, const std::filesystem::path& out_dir) {
    const auto spec = spec_from(config_json);
    const auto run = [&] {
      py::gil_scoped_release release;
      return run_pipeline(spec, out_dir);
    }();
    return run.files;
  }, py::arg("config_json"), py::arg("out_dir"));
}
