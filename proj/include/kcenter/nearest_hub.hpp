#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "kcenter/geometry.hpp"
#include "kcenter/lsh.hpp"

namespace kcenter {

inline constexpr Index kNoHub = std::numeric_limits<Index>::max();

struct HubMatch {
  Index point = 0;
  Index hub = kNoHub;
  std::uint32_t trial = 0;  // i
  std::uint32_t level = 0;  // j, radius guess 2^j
};

struct NhsStats {
  std::size_t trials_run = 0;
  std::size_t levels = 0;  // ceil(log2 Delta) + 1
  std::size_t levels_evaluated = 0;
  std::size_t levels_skipped = 0;
  std::size_t hub_hashes = 0;        // f_ell evaluations on hubs
  std::size_t truncated_probes = 0;  // probes whose bucket held more than the cap
  std::size_t max_bucket_hubs = 0;   // largest bucket seen by a probe, capped
};

/// close(q) for every non-hub q of Q, in the order q appears in Q.
struct HubAssignment {
  std::vector<HubMatch> matches;
  bool failed = false;
  NhsStats stats;

  std::size_t unassigned_count() const noexcept;
};

/// Radius guesses are 2^0 .. 2^ceil(log2 delta). `params` supplies rho,
/// c_rho, K, L, I, w, the bucket cap and the seed; params.r is ignored.
/// Throws EmptySet (no hubs) and HubNotInSet (a hub outside Q). A point no
/// trial could place leaves `failed` set; the caller decides whether that
/// is fatal.
HubAssignment nearest_hub_search(const PointSet& points, std::span<const Index> members,
                                 std::span<const Index> hubs, const LshParams& params, double delta);

}  // namespace kcenter
