#include "kcenter/nearest_index.hpp"

#include <algorithm>
#include <cmath>

namespace kcenter {

namespace {
constexpr std::size_t kLeafSize = 8;
}

NearestIndex::NearestIndex(const PointSet& points, std::span<const Index> members)
    : points_(&points), order_(members.begin(), members.end()) {
  if (!order_.empty()) {
    nodes_.reserve(2 * order_.size() / kLeafSize + 2);
    build(0, order_.size());
  }
}

std::size_t NearestIndex::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  const std::size_t dim = points_->dim();
  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t a = 0; a < dim; ++a) {
    double lo = points_->coords(order_[begin])[a];
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = points_->coords(order_[i])[a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = a;
    }
  }
  if (widest <= 0.0) return id;  // all coincide on every axis

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](Index a, Index b) { return points_->coords(a)[axis] < points_->coords(b)[axis]; });
  const double split = points_->coords(order_[mid])[axis];

  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  Node& node = nodes_[id];
  node.leaf = false;
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

Neighbor NearestIndex::nearest(std::span<const double> query) const {
  Neighbor best;
  if (!order_.empty()) search(0, query, best);
  return best;
}

void NearestIndex::search(std::size_t node_id, std::span<const double> query, Neighbor& best) const {
  const Node& node = nodes_[node_id];
  if (node.leaf) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const Index idx = order_[i];
      const double d = dist(points_->coords(idx), query);
      if (d < best.distance || (d == best.distance && idx < best.index)) best = {idx, d};
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, query, best);
  // <= keeps equal-distance candidates on the far side reachable for the tie rule.
  if (std::abs(diff) <= best.distance) search(far, query, best);
}

void NearestIndex::within(std::span<const double> query, double radius, std::vector<Index>& out) const {
  if (!order_.empty()) collect(0, query, radius, out);
}

void NearestIndex::collect(std::size_t node_id, std::span<const double> query, double radius,
                           std::vector<Index>& out) const {
  const Node& node = nodes_[node_id];
  if (node.leaf) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      if (dist(points_->coords(order_[i]), query) <= radius) out.push_back(order_[i]);
    }
    return;
  }
  const double diff = query[node.axis] - node.split;
  if (diff <= radius) collect(node.left, query, radius, out);
  if (diff >= -radius) collect(node.right, query, radius, out);
}

}  // namespace kcenter
