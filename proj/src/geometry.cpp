#include "clustercache/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace clustercache {

Region::Region(double width, double height, double x0, double y0)
    : width_(width), height_(height), x0_(x0), y0_(y0) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw std::invalid_argument("region: width and height must be positive and finite");
  }
}

bool Region::contains(Point p) const {
  return p.x >= x0_ && p.x <= x0_ + width_ && p.y >= y0_ && p.y <= y0_ + height_;
}

Region Region::expanded(double margin) const {
  if (margin < 0.0) {
    throw std::invalid_argument("region: negative margin");
  }
  return Region(width_ + 2.0 * margin, height_ + 2.0 * margin, x0_ - margin, y0_ - margin);
}

PointSet sample_ppp(double intensity, const Region& region, Rng& rng) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("sample_ppp: intensity must be finite and >= 0");
  }
  PointSet out;
  out.intensity = intensity;
  out.region = region;
  const double mean = intensity * region.area();
  if (mean == 0.0) {
    return out;
  }
  std::poisson_distribution<std::size_t> count_dist(mean);
  const std::size_t n = count_dist(rng);
  std::uniform_real_distribution<double> ux(region.x0(), region.x0() + region.width());
  std::uniform_real_distribution<double> uy(region.y0(), region.y0() + region.height());
  out.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.positions.push_back({x, y});
  }
  return out;
}

PointSet sample_ppp(double intensity, const Region& region, std::uint64_t seed) {
  Rng rng(seed);
  return sample_ppp(intensity, region, rng);
}

std::size_t points_within(const PointSet& points, Point center, double radius,
                          std::span<const std::size_t> filter) {
  if (radius < 0.0) {
    throw std::invalid_argument("points_within: negative radius");
  }
  const double r2 = radius * radius;
  std::size_t count = 0;
  for (std::size_t idx : filter) {
    if (squared_distance(points.positions.at(idx), center) <= r2) {
      ++count;
    }
  }
  return count;
}

std::size_t points_within(const PointSet& points, Point center, double radius) {
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return points_within(points, center, radius, all);
}

std::vector<int> thin_labels(std::size_t count, std::span<const double> probs, Rng& rng) {
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] < 0.0) {
      throw std::invalid_argument("thin_labels: negative probability");
    }
    acc += probs[k];
    cumulative[k] = acc;
  }
  if (acc > 1.0 + 1e-9) {
    throw std::invalid_argument("thin_labels: probabilities sum above 1");
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> labels(count, -1);
  for (auto& label : labels) {
    const double draw = u(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
    if (it != cumulative.end()) {
      label = static_cast<int>(it - cumulative.begin());
    }
  }
  return labels;
}

GridIndex::GridIndex(const PointSet& points, std::span<const std::size_t> subset, double cell_size)
    : x0_(points.region.x0()), y0_(points.region.y0()), cell_(cell_size) {
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("grid index: cell size must be positive");
  }
  nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(points.region.width() / cell_)));
  ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(points.region.height() / cell_)));
  // Cap memory for tiny radii over large regions.
  while (nx_ * ny_ > 4 * subset.size() + 1024) {
    cell_ *= 2.0;
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(points.region.width() / cell_)));
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(points.region.height() / cell_)));
  }

  auto cell_of = [&](Point p) {
    const auto cx = std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, (p.x - x0_) / cell_)));
    const auto cy = std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, (p.y - y0_) / cell_)));
    return cy * nx_ + cx;
  };

  cell_start_.assign(nx_ * ny_ + 1, 0);
  for (std::size_t idx : subset) {
    ++cell_start_[cell_of(points.positions.at(idx)) + 1];
  }
  std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
  points_.resize(subset.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t idx : subset) {
    const Point p = points.positions[idx];
    points_[fill[cell_of(p)]++] = p;
  }
}

namespace {
std::vector<std::size_t> all_indices(const PointSet& points) {
  std::vector<std::size_t> all(points.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}
}  // namespace

GridIndex::GridIndex(const PointSet& points, double cell_size)
    : GridIndex(points, all_indices(points), cell_size) {}

template <typename Visit>
void GridIndex::visit_cells(Point center, double radius, Visit&& visit) const {
  const double r2 = radius * radius;
  const auto lo = [&](double v, double origin) {
    return static_cast<long long>(std::floor((v - radius - origin) / cell_));
  };
  const auto hi = [&](double v, double origin) {
    return static_cast<long long>(std::floor((v + radius - origin) / cell_));
  };
  const long long cx0 = std::max(0LL, lo(center.x, x0_));
  const long long cx1 = std::min(static_cast<long long>(nx_) - 1, hi(center.x, x0_));
  const long long cy0 = std::max(0LL, lo(center.y, y0_));
  const long long cy1 = std::min(static_cast<long long>(ny_) - 1, hi(center.y, y0_));
  for (long long cy = cy0; cy <= cy1; ++cy) {
    for (long long cx = cx0; cx <= cx1; ++cx) {
      const std::size_t cell = static_cast<std::size_t>(cy) * nx_ + static_cast<std::size_t>(cx);
      for (std::size_t j = cell_start_[cell]; j < cell_start_[cell + 1]; ++j) {
        if (squared_distance(points_[j], center) <= r2 && !visit()) {
          return;
        }
      }
    }
  }
}

std::size_t GridIndex::count_within(Point center, double radius) const {
  if (radius < 0.0) {
    throw std::invalid_argument("count_within: negative radius");
  }
  std::size_t count = 0;
  visit_cells(center, radius, [&] {
    ++count;
    return true;
  });
  return count;
}

bool GridIndex::any_within(Point center, double radius) const {
  if (radius < 0.0) {
    throw std::invalid_argument("any_within: negative radius");
  }
  bool found = false;
  visit_cells(center, radius, [&] {
    found = true;
    return false;
  });
  return found;
}

}  // namespace clustercache
