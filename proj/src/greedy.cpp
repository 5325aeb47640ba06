#include "kcenter/greedy.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "kcenter/error.hpp"

namespace kcenter {

namespace {

// Farthest-point traversal; stops after `max_centers` or when the farthest
// remaining point is within `threshold`.
std::vector<Index> traverse(const PointSet& points, std::span<const Index> members, Index seed, double threshold,
                            std::size_t max_centers) {
  const auto it = std::find(members.begin(), members.end(), seed);
  if (it == members.end()) {
    throw Error(ErrorKind::kHubNotInSet, "seed point " + std::to_string(points.id(seed)) + " is not in the set");
  }
  std::vector<Index> centers{seed};
  std::vector<double> gap(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) gap[i] = dist(points.coords(members[i]), points.coords(seed));

  while (centers.size() < max_centers) {
    std::size_t far = members.size();
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (far == members.size() || gap[i] > gap[far] || (gap[i] == gap[far] && members[i] < members[far])) far = i;
    }
    if (far == members.size() || !(gap[far] > threshold)) break;
    const Index c = members[far];
    centers.push_back(c);
    for (std::size_t i = 0; i < members.size(); ++i) {
      gap[i] = std::min(gap[i], dist(points.coords(members[i]), points.coords(c)));
    }
  }
  return centers;
}

}  // namespace

std::vector<Index> greedy_threshold(const PointSet& points, std::span<const Index> members, Index seed,
                                    double threshold) {
  return traverse(points, members, seed, threshold, std::numeric_limits<std::size_t>::max());
}

std::vector<Index> greedy(const PointSet& points, std::span<const Index> members, Index hub, double r,
                          double c_rho) {
  if (!(r > 0.0)) throw Error(ErrorKind::kInvalidParams, "greedy radius must be positive");
  return greedy_threshold(points, members, hub, 4.0 * c_rho * r);
}

std::vector<Index> farthest_first(const PointSet& points, std::span<const Index> members, Index seed,
                                  std::size_t k) {
  if (k == 0) throw Error(ErrorKind::kInvalidParams, "k must be >= 1");
  return traverse(points, members, seed, 0.0, k);
}

std::size_t split_part_count(std::size_t bag_size, std::size_t capacity) {
  if (bag_size <= capacity) return 1;
  return (bag_size - 1 + capacity - 2) / (capacity - 1);
}

std::size_t split_part_of(std::size_t rank, std::size_t bag_size, std::size_t capacity) {
  if (rank == 0 || bag_size <= capacity) return 0;
  return (rank - 1) / (capacity - 1);
}

std::size_t split_part_size(std::size_t part, std::size_t bag_size, std::size_t capacity) {
  if (bag_size <= capacity) return bag_size;
  const std::size_t others = bag_size - 1;
  const std::size_t first = part * (capacity - 1);
  return 1 + std::min(capacity - 1, others - first);
}

Bag split_bag(Bag bag, std::size_t capacity) {
  if (capacity < 2) throw Error(ErrorKind::kInvalidParams, "bag capacity must be >= 2");
  if (bag.members.size() <= capacity) throw Error(ErrorKind::kInvalidParams, "bag fits; nothing to split");
  std::vector<Index> others;
  others.reserve(bag.members.size() - 1);
  bool hub_seen = false;
  for (Index m : bag.members) {
    if (m == bag.hub) {
      hub_seen = true;
    } else {
      others.push_back(m);
    }
  }
  if (!hub_seen) throw Error(ErrorKind::kHubNotInSet, "hub is not a member of its bag");
  std::sort(others.begin(), others.end());

  bag.parts.clear();
  for (std::size_t first = 0; first < others.size(); first += capacity - 1) {
    std::vector<Index> part{bag.hub};
    const std::size_t last = std::min(others.size(), first + capacity - 1);
    part.insert(part.end(), others.begin() + static_cast<std::ptrdiff_t>(first),
                others.begin() + static_cast<std::ptrdiff_t>(last));
    bag.parts.push_back(std::move(part));
  }
  return bag;
}

}  // namespace kcenter
