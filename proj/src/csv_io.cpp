#include "clustercache/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace clustercache::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.back() == '\r') {
      field.pop_back();
    }
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: not a number: '" + s + "'");
  }
  return v;
}

std::size_t to_size(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: not a non-negative integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  throw std::runtime_error("csv: missing column '" + name + "'");
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("csv: cannot open " + path.string());
  }
  Table t;
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv: " + path.string() + " is empty");
  }
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw std::runtime_error("csv: " + path.string() + " has a row with " +
                               std::to_string(row.size()) + " fields, expected " +
                               std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("csv: cannot write " + path.string());
  }
  out << text;
}

std::string profiles_csv(const Profiles& profiles) {
  std::ostringstream out;
  const std::size_t f = profiles.empty() ? 0 : profiles.front().probs.size();
  out << "user_id";
  for (std::size_t i = 0; i < f; ++i) {
    out << ',' << i;
  }
  out << '\n';
  for (const auto& p : profiles) {
    out << p.user_id;
    for (double v : p.probs) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  return out.str();
}

Profiles read_profiles(const std::filesystem::path& path) {
  const Table t = read_table(path);
  if (t.header.empty() || t.header.front() != "user_id") {
    throw std::runtime_error("csv: " + path.string() + " must start with a user_id column");
  }
  for (std::size_t i = 1; i < t.header.size(); ++i) {
    if (t.header[i] != std::to_string(i - 1)) {
      throw std::runtime_error("csv: file columns must be 0..F-1 in order");
    }
  }
  Profiles out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    PopularityProfile p;
    p.user_id = to_size(row[0]);
    p.probs.reserve(row.size() - 1);
    for (std::size_t i = 1; i < row.size(); ++i) {
      p.probs.push_back(to_double(row[i]));
    }
    out.push_back(std::move(p));
  }
  validate_profiles(out, 1e-6);
  return out;
}

std::string planted_csv(const std::vector<std::size_t>& membership) {
  std::ostringstream out;
  out << "user_id,planted_cluster\n";
  for (std::size_t u = 0; u < membership.size(); ++u) {
    out << u << ',' << membership[u] << '\n';
  }
  return out.str();
}

std::string clusters_csv(const Profiles& profiles, const std::vector<std::size_t>& assignment) {
  std::ostringstream out;
  out << "user_id,cluster_id\n";
  for (std::size_t u = 0; u < profiles.size(); ++u) {
    out << profiles[u].user_id << ',' << assignment.at(u) << '\n';
  }
  return out.str();
}

std::vector<std::size_t> read_clusters(const std::filesystem::path& path, const Profiles& profiles) {
  const Table t = read_table(path);
  const std::size_t uc = t.column("user_id");
  const std::size_t cc = t.column("cluster_id");
  std::unordered_map<std::size_t, std::size_t> by_user;
  for (const auto& row : t.rows) {
    by_user[to_size(row[uc])] = to_size(row[cc]);
  }
  std::vector<std::size_t> assignment;
  assignment.reserve(profiles.size());
  for (const auto& p : profiles) {
    const auto it = by_user.find(p.user_id);
    if (it == by_user.end()) {
      throw std::runtime_error("csv: no cluster for user " + std::to_string(p.user_id));
    }
    assignment.push_back(it->second);
  }
  return assignment;
}

std::string centroids_csv(const ClusterModel& model) {
  std::ostringstream out;
  const std::size_t f = model.centroids.empty() ? 0 : model.centroids.front().size();
  out << "cluster_id";
  for (std::size_t i = 0; i < f; ++i) {
    out << ',' << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < model.centroids.size(); ++k) {
    out << k;
    for (double v : model.centroids[k]) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
  return out.str();
}

std::string aic_trace_header() { return std::string(kAicTraceHeader) + "\n"; }

std::string aic_trace_row(const ModelScore& s) {
  std::ostringstream out;
  out << s.cluster_count << ',' << s.parameter_count << ',' << format_double(s.log_likelihood) << ','
      << format_double(s.aic) << ',' << format_double(s.aic_normalized) << '\n';
  return out.str();
}

std::string allocation_rows(double radius, double sbs_density, std::size_t cache_size,
                            const Allocation& allocation) {
  std::ostringstream out;
  for (std::size_t k = 0; k < allocation.fractions.size(); ++k) {
    out << format_double(radius) << ',' << format_double(sbs_density) << ',' << cache_size << ','
        << k << ',' << format_double(allocation.psi[k]) << ','
        << format_double(allocation.fractions[k]) << ',' << to_string(allocation.method) << '\n';
  }
  return out.str();
}

std::vector<AllocationRow> read_allocation(const std::filesystem::path& path) {
  const Table t = read_table(path);
  const std::size_t rc = t.column("R");
  const std::size_t lc = t.column("lambda_s");
  const std::size_t mc = t.column("M");
  const std::size_t kc = t.column("cluster_id");
  const std::size_t pc = t.column("psi");
  const std::size_t fc = t.column("fraction");
  const std::size_t mth = t.column("method");
  std::vector<AllocationRow> out;
  for (const auto& row : t.rows) {
    out.push_back({to_double(row[rc]), to_double(row[lc]), to_size(row[mc]), to_size(row[kc]),
                   to_double(row[pc]), to_double(row[fc]), row[mth]});
  }
  return out;
}

std::string hits_row(double radius, double sbs_density, std::size_t cache_size,
                     const std::string& scheme, const HitReport& r) {
  std::ostringstream out;
  out << format_double(radius) << ',' << format_double(sbs_density) << ',' << cache_size << ','
      << scheme << ',' << format_double(r.analytic) << ',' << format_double(r.mc_estimate) << ','
      << format_double(r.mc_halfwidth_95) << ',' << r.n_trials << ','
      << (r.overlap_warning ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace clustercache::csv
