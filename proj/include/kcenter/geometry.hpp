#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kcenter {

/// Position of a point inside a PointSet. Algorithms pass subsets around as
/// sorted index vectors into one shared, normalized PointSet.
using Index = std::uint32_t;

inline constexpr std::size_t kMaxDim = 8;
inline constexpr double kDistTolerance = 1e-9;

struct Point {
  std::vector<double> coords;
  std::int64_t id = 0;
};

/// Euclidean distance. Throws DimensionMismatch.
double dist(const Point& p, const Point& q);
/// Unchecked variant; spans must have equal length.
double dist(std::span<const double> p, std::span<const double> q) noexcept;

/// Immutable set of points in R^d stored row-major, with cached extremal
/// pair distances.
class PointSet {
 public:
  PointSet() = default;
  /// Validates dimensions (1..kMaxDim), finiteness and id uniqueness.
  PointSet(std::size_t dim, std::vector<double> coords, std::vector<std::int64_t> ids);

  static PointSet from_points(const std::vector<Point>& points);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> coords(std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<const double> raw() const noexcept { return coords_; }
  std::int64_t id(std::size_t i) const noexcept { return ids_[i]; }
  const std::vector<std::int64_t>& ids() const noexcept { return ids_; }
  Point point(std::size_t i) const;

  /// Maximum pairwise distance (0 for fewer than two points).
  double delta_diameter() const noexcept { return delta_; }
  /// Minimum pairwise distance (0 for fewer than two points).
  double min_pair_dist() const noexcept { return min_pair_; }

  /// Copy with every coordinate multiplied by `factor`.
  PointSet scaled(double factor) const;
  /// Points at the given positions, in the given order.
  PointSet subset(std::span<const Index> members) const;

 private:
  void refresh_extremes();

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::int64_t> ids_;
  double delta_ = 0.0;
  double min_pair_ = 0.0;
};

/// Min distance from p to S. Throws EmptySet / DimensionMismatch.
double dist_to_set(const Point& p, const PointSet& s);

/// COST(P, S) = max over p in P of dist_to_set(p, S). Throws EmptySet.
double cost(const PointSet& points, const PointSet& centers);

/// COST restricted to positions of one PointSet. Uses a kd-tree, so it is
/// cheap enough to evaluate after every refinement stage.
double cost(const PointSet& points, std::span<const Index> from, std::span<const Index> centers);

/// Rescales so the closest pair is at distance 1; requires n >= 2 and no
/// duplicate coordinate vectors (DuplicatePoints).
PointSet normalize(const std::vector<Point>& raw);
PointSet normalize(const PointSet& raw);

/// Closest-pair distance: O(n^2) scan up to 2000 points, randomized
/// incremental grid above.
double closest_pair_distance(const PointSet& points);
/// Exact diameter with centroid-distance pruning.
double diameter(const PointSet& points);

std::vector<Index> all_indices(const PointSet& points);

}  // namespace kcenter
