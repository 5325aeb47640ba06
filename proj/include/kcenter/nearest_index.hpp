#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kcenter/geometry.hpp"

namespace kcenter {

struct Neighbor {
  Index index = 0;
  double distance = std::numeric_limits<double>::infinity();
};

/// Static kd-tree over a subset of a PointSet for exact nearest-neighbour
/// queries. Ties on distance resolve to the lowest index.
class NearestIndex {
 public:
  NearestIndex(const PointSet& points, std::span<const Index> members);

  bool empty() const noexcept { return order_.empty(); }
  Neighbor nearest(std::span<const double> query) const;
  /// Appends every member within `radius` of `query` (unordered).
  void within(std::span<const double> query, double radius, std::vector<Index>& out) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t axis = 0;
    double split = 0.0;
    bool leaf = true;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, std::span<const double> query, Neighbor& best) const;
  void collect(std::size_t node, std::span<const double> query, double radius, std::vector<Index>& out) const;

  const PointSet* points_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
};

}  // namespace kcenter
