#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "clustercache/rng.hpp"

namespace clustercache {

struct Point {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

inline double squared_distance(Point a, Point b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Axis-aligned rectangle [x0, x0+width] x [y0, y0+height], in km.
class Region {
 public:
  Region(double width, double height, double x0 = 0.0, double y0 = 0.0);

  double width() const { return width_; }
  double height() const { return height_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double area() const { return width_ * height_; }
  bool contains(Point p) const;

  /// Same rectangle grown by `margin` on every side.
  Region expanded(double margin) const;

 private:
  double width_;
  double height_;
  double x0_;
  double y0_;
};

/// Realization of a homogeneous point process. Immutable once sampled, so it
/// can be shared freely between Monte Carlo workers.
struct PointSet {
  std::vector<Point> positions;
  double intensity = 0.0;  // points per km^2
  Region region{1.0, 1.0};

  std::size_t size() const { return positions.size(); }
};

PointSet sample_ppp(double intensity, const Region& region, Rng& rng);
PointSet sample_ppp(double intensity, const Region& region, std::uint64_t seed);

/// Number of points (restricted to `filter`) at distance <= radius from
/// `center`. Closed ball. Linear scan.
std::size_t points_within(const PointSet& points, Point center, double radius,
                          std::span<const std::size_t> filter);
std::size_t points_within(const PointSet& points, Point center, double radius);

/// Independent thinning: label[j] = k with probability probs[k], or -1 with
/// probability 1 - sum(probs).
std::vector<int> thin_labels(std::size_t count, std::span<const double> probs, Rng& rng);

/// Uniform-grid index over a subset of a PointSet. Cell size is normally the
/// query radius, so a query touches at most 3x3 cells. Answers agree with
/// points_within.
class GridIndex {
 public:
  GridIndex(const PointSet& points, std::span<const std::size_t> subset, double cell_size);
  GridIndex(const PointSet& points, double cell_size);

  std::size_t count_within(Point center, double radius) const;
  bool any_within(Point center, double radius) const;

 private:
  template <typename Visit>
  void visit_cells(Point center, double radius, Visit&& visit) const;

  std::vector<Point> points_;
  std::vector<std::size_t> cell_start_;  // CSR offsets, size cells+1
  double x0_;
  double y0_;
  double cell_;
  std::size_t nx_;
  std::size_t ny_;
};

}  // namespace clustercache
