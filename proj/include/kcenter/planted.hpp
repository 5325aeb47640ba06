#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kcenter/geometry.hpp"

namespace kcenter {

struct PlantedInstance {
  PointSet points;  // normalized
  std::size_t k_true = 0;
  double r_star = 0.0;      // after normalization
  double separation = 0.0;  // after normalization
  double scale = 1.0;       // factor applied by normalization
  std::vector<std::uint32_t> membership;  // position -> planted cluster
  std::vector<Index> planted_centers;     // position of each cluster's center
  std::uint64_t seed = 0;
};

/// k centers at pairwise distance >= separation inside a box of side
/// `box_side` (0 picks 2 * separation * ceil(k^(1/d))), then n points split
/// near-evenly. Each cluster's first point is its center; the rest are
/// uniform in the radius-r_star ball around it. The result is normalized.
/// Throws InvalidParams and InfeasibleGeometry.
PlantedInstance generate_planted(std::size_t k, std::size_t n, std::size_t d, double r_star, double separation,
                                 std::uint64_t seed, double box_side = 0.0);

}  // namespace kcenter
