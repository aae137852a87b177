#include "clustercache/allocation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace clustercache {

const char* to_string(AllocationMethod method) {
  switch (method) {
    case AllocationMethod::ClosedForm:
      return "closed-form";
    case AllocationMethod::Projected:
      return "projected";
    case AllocationMethod::Numerical:
      return "numerical";
    case AllocationMethod::Uniform:
      return "uniform";
  }
  return "unknown";
}

double cluster_mass(std::span<const PopularityProfile> profiles, std::span<const std::size_t> files) {
  double mass = 0.0;
  for (const auto& p : profiles) {
    for (std::size_t i : files) {
      mass += p.probs.at(i);
    }
  }
  return mass;
}

double coverage_load(double sbs_density, double radius) {
  return sbs_density * std::numbers::pi * radius * radius;
}

double hit_objective(std::span<const double> masses, std::span<const double> fractions,
                     double sbs_density, double radius, std::size_t n_users) {
  if (masses.size() != fractions.size()) {
    throw std::invalid_argument("hit_objective: size mismatch");
  }
  const double load = coverage_load(sbs_density, radius);
  double total = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    total += masses[k] * -std::expm1(-fractions[k] * load);
  }
  return total / static_cast<double>(n_users);
}

namespace {

void check_inputs(std::span<const double> masses, double load) {
  if (masses.empty()) {
    throw std::invalid_argument("optimize_fractions: no clusters");
  }
  if (!(load > 0.0) || !std::isfinite(load)) {
    throw std::invalid_argument("optimize_fractions: lambda_s * pi * R^2 must be positive");
  }
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("optimize_fractions: masses must be finite and >= 0");
    }
  }
}

}  // namespace

Allocation uniform_fractions(std::span<const double> masses, double sbs_density, double radius) {
  const double load = coverage_load(sbs_density, radius);
  check_inputs(masses, load);
  Allocation out;
  out.method = AllocationMethod::Uniform;
  out.fractions.assign(masses.size(), 0.0);
  out.psi.resize(masses.size());
  std::size_t positive = 0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    out.psi[k] = load * masses[k];
    positive += masses[k] > 0.0 ? 1 : 0;
  }
  for (std::size_t k = 0; k < masses.size(); ++k) {
    if (positive == 0 || masses[k] > 0.0) {
      out.fractions[k] = 1.0 / static_cast<double>(positive == 0 ? masses.size() : positive);
    }
  }
  return out;
}

Allocation optimize_fractions(std::span<const double> masses, double sbs_density, double radius,
                              std::size_t n_users) {
  const double load = coverage_load(sbs_density, radius);
  check_inputs(masses, load);
  if (n_users == 0) {
    throw std::invalid_argument("optimize_fractions: n_users must be >= 1");
  }

  Allocation out;
  const std::size_t n = masses.size();
  out.psi.resize(n);
  out.fractions.assign(n, 0.0);
  std::vector<bool> active(n, false);
  std::size_t n_active = 0;
  for (std::size_t k = 0; k < n; ++k) {
    out.psi[k] = load * masses[k];
    if (masses[k] > 0.0) {
      active[k] = true;
      ++n_active;
    }
  }
  if (n_active == 0) {
    out = uniform_fractions(masses, sbs_density, radius);
    out.warnings.push_back("all cluster masses are zero; objective is flat, using uniform fractions");
    return out;
  }

  out.method = AllocationMethod::ClosedForm;
  for (;;) {
    double sum_log = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (active[k]) {
        sum_log += std::log(out.psi[k]);
      }
    }
    const double na = static_cast<double>(n_active);
    std::size_t most_negative = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) {
        out.fractions[k] = 0.0;
        continue;
      }
      out.fractions[k] = (na * std::log(out.psi[k]) - sum_log + load) / (na * load);
      if (out.fractions[k] < 0.0 &&
          (most_negative == n || out.fractions[k] < out.fractions[most_negative])) {
        most_negative = k;
      }
    }
    if (most_negative == n) {
      break;
    }
    active[most_negative] = false;
    --n_active;
    out.method = AllocationMethod::Projected;
  }

  // Stationarity on any active cluster: mass_k * load * exp(-x_k load) / N_u = mu.
  for (std::size_t k = 0; k < n; ++k) {
    if (active[k]) {
      out.multiplier = out.psi[k] * std::exp(-out.fractions[k] * load) / static_cast<double>(n_users);
      break;
    }
  }
  return out;
}

}  // namespace clustercache
