#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kcenter/geometry.hpp"
#include "kcenter/mpc.hpp"
#include "kcenter/refine.hpp"
#include "kcenter/sample_solve.hpp"

namespace kcenter {

struct WrapperConfig {
  std::size_t k = 1;
  std::size_t psi = 0;  // 0: ceil(c_psi log2 max(n, log2 delta))
  std::size_t phi = 0;  // 0: ceil(log2 delta) + 1
  bool full_ladder = false;
  std::size_t threads = 1;  // repetitions evaluated concurrently
  ExtOptions ext;
};

struct RepetitionOutcome {
  std::optional<std::size_t> centers;  // empty when the repetition failed
  std::string error;                   // "<kind> at <stage>: <message>"
  std::size_t rounds = 0;
};

struct RepeatResult {
  ExtResult best;
  std::size_t best_index = 0;
  std::size_t psi = 1;
  std::vector<RepetitionOutcome> repetitions;
  /// Repetitions run side by side: rounds is the slowest one, space adds up.
  std::size_t rounds = 0;
  std::size_t peak_local_words = 0;
  std::size_t peak_global_words = 0;
  mpc::UsageReport best_usage;
};

/// Index of the smallest successful size (lowest index on ties); empty
/// when every entry failed.
std::optional<std::size_t> pick_smallest(std::span<const std::optional<std::size_t>> sizes);

/// Ext': psi seeded Ext-k-Center runs; the smallest |T| wins (lowest index
/// on ties). Throws AllRepetitionsFailed.
RepeatResult ext_k_center_repeat(const PointSet& points, const PipelineConfig& config, std::size_t alpha, double r,
                                 std::size_t psi, std::uint64_t seed, std::size_t threads = 1,
                                 const ExtOptions& options = {});

struct LadderEntry {
  double r = 0.0;
  bool evaluated = false;
  std::optional<bool> feasible;
  std::optional<std::size_t> centers;
  std::size_t rounds = 0;
  std::string error;
};

struct SearchResult {
  std::vector<Index> centers;
  double chosen_r = 0.0;
  std::size_t chosen_index = 0;  // 0-based ladder position
  std::size_t threshold = 0;
  std::size_t psi = 1;
  std::size_t phi = 1;
  std::size_t alpha_used = 1;
  std::vector<LadderEntry> ladder;
  RepeatResult chosen;
  std::size_t rounds_total = 0;  // ladder entries evaluated one after another
  std::size_t peak_local_words = 0;
  std::size_t peak_global_words = 0;
  bool outside_regime = false;
};

/// Ext'': Ext' over r(i) = delta / 2^(i-1), scanned from the top. Returns
/// the last feasible radius before the first infeasible one. Throws
/// NoFeasibleRadius, or AllRepetitionsFailed when r(1) has no survivor.
SearchResult ext_k_center_search(const PointSet& points, const PipelineConfig& config, std::size_t alpha,
                                 const WrapperConfig& wrapper, std::uint64_t seed);

/// k below (log2 n)^2 is outside the regime the guarantees address.
bool outside_analyzed_regime(std::size_t k, std::size_t n) noexcept;

}  // namespace kcenter
