#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kcenter/geometry.hpp"

namespace kcenter {

/// Farthest-point traversal over `members` seeded at `seed`, adding the point
/// farthest from the current centers while that distance exceeds
/// `threshold`. Distance ties go to the lowest position. Centers are returned
/// in selection order. Throws HubNotInSet if `seed` is not a member.
std::vector<Index> greedy_threshold(const PointSet& points, std::span<const Index> members, Index seed,
                                    double threshold);

/// Greedy(R, h, r): threshold 4 c_rho r.
std::vector<Index> greedy(const PointSet& points, std::span<const Index> members, Index hub, double r,
                          double c_rho);

/// min(k, |members|) centers by farthest-point traversal from `seed`.
std::vector<Index> farthest_first(const PointSet& points, std::span<const Index> members, Index seed,
                                  std::size_t k);

struct Bag {
  Index hub = 0;
  std::vector<Index> members;             // includes hub
  std::vector<std::vector<Index>> parts;  // filled by split_bag
};

/// Number of parts for a bag of `bag_size` points (hub included):
/// 1 if it fits, else ceil((bag_size - 1) / (capacity - 1)).
std::size_t split_part_count(std::size_t bag_size, std::size_t capacity);

/// Part of the non-hub member with 1-based rank `rank` inside its bag (the
/// hub has rank 0 and lives in part 0).
std::size_t split_part_of(std::size_t rank, std::size_t bag_size, std::size_t capacity);

/// Size of part `part` including its copy of the hub.
std::size_t split_part_size(std::size_t part, std::size_t bag_size, std::size_t capacity);

/// Chunks the non-hub members, in position order, into runs of
/// capacity - 1 and puts the hub first in every part. Requires
/// capacity >= 2 and members.size() > capacity (InvalidParams).
Bag split_bag(Bag bag, std::size_t capacity);

}  // namespace kcenter
