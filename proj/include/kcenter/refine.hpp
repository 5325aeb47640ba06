#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kcenter/geometry.hpp"
#include "kcenter/sample_solve.hpp"
#include "kcenter/schedule.hpp"

namespace kcenter {

/// One Sample-And-Solve call inside a refinement run.
struct StageTrace {
  std::string stage;  // "phase1.1.iter2", "phase2.3", "uniform.iter1"
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  double r_used = 0.0;
  double p_used = 0.0;
  std::size_t rounds_charged = 0;
  double measured_cost_bound = 0.0;  // running certificate after this stage
  double measured_cost = 0.0;        // cost of the reference set against this stage's output
};

struct UniformResult {
  std::vector<Index> centers;
  UniformSchedule schedule;
  double cost_bound = 0.0;  // 4 c_rho r tau
  double cost = 0.0;        // cost(V, S)
  std::vector<StageTrace> trace;
};

/// Uniform-Center(V, r, t). Failures carry the stage tag of the failing call.
UniformResult uniform_center(Engine& engine, std::span<const Index> v, double r, double t, std::uint64_t seed);

struct ExtOptions {
  bool clamp_alpha = true;
  /// Raise Validation if a stage breaks nesting or the running certificate.
  bool check_certificate = true;
};

struct ExtResult {
  std::vector<Index> centers;  // sorted positions
  ExtSchedule schedule;
  std::size_t alpha_requested = 1;
  std::size_t alpha_used = 1;
  double cost_certificate = 0.0;
  double cost = 0.0;
  std::size_t rounds = 0;
  std::vector<StageTrace> trace;
};

/// Ext-k-Center(P, alpha, r) over every point held by `engine`.
ExtResult ext_k_center(Engine& engine, std::size_t alpha, double r, std::uint64_t seed,
                       const ExtOptions& options = {});

/// Certificate comparison used throughout: cost <= bound + 1e-9 max(1, bound).
bool within_certificate(double cost, double bound) noexcept;

}  // namespace kcenter
