#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kcenter/geometry.hpp"
#include "kcenter/lsh.hpp"
#include "kcenter/mpc.hpp"
#include "kcenter/nearest_hub.hpp"
#include "kcenter/schedule.hpp"

namespace kcenter {

enum class ExecutionMode { kInProcess, kSimulated };

struct PipelineConfig {
  double delta = 0.5;
  double rho = 0.5;
  double c_s = 4.0;
  std::size_t primitive_round_cost = 1;
  double bucket_width = 1.0;
  std::size_t max_hubs_per_bucket = 10;
  ExecutionMode mode = ExecutionMode::kSimulated;
  std::size_t host_threads = 1;
  ScheduleConstants constants;

  /// Throws InvalidParams.
  void validate() const;
};

/// One point as stored on a simulated machine: id, coordinates, the
/// assigned hub with its coordinates, and four scratch words.
struct PointRecord {
  Index pos = 0;
  std::uint8_t dim = 0;
  bool copy = false;
  Index hub = kNoHub;
  std::array<double, kMaxDim> coords{};
  std::array<double, kMaxDim> hub_coords{};
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;

  std::size_t words() const noexcept { return 2 * static_cast<std::size_t>(dim) + 6; }
};

struct SampleSolveResult {
  std::vector<Index> centers;  // sorted positions
  std::vector<Index> hubs;     // sorted positions; empty on the single-machine path
  std::vector<HubMatch> matches;
  bool single_machine = false;
  std::size_t bags = 0;
  std::size_t split_bags = 0;
  std::size_t parts = 0;
  std::size_t rounds = 0;
  NhsStats nhs;
};

/// Runs Sample-And-Solve calls over one normalized point set. In simulated
/// mode the engine owns an MPC cluster sized for the whole set and keeps
/// the current center set resident between calls.
class Engine {
 public:
  Engine(const PointSet& points, PipelineConfig config);

  const PointSet& points() const noexcept { return *points_; }
  const PipelineConfig& config() const noexcept { return config_; }
  const LshParams& lsh() const noexcept { return lsh_; }
  double c_rho() const noexcept { return lsh_.c_rho; }
  std::size_t local_space() const noexcept { return local_space_; }
  std::size_t record_words() const noexcept { return record_words_; }
  /// Points per machine: floor(S / record_words).
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t machine_count() const noexcept { return 2 * half_machines_; }

  /// Places `members` on the cluster as fresh input (no rounds charged).
  void load(std::span<const Index> members);

  /// S subset of Q with cost(Q, S) <= 4 c_rho r. Throws SampleFailed or
  /// SearchFailed.
  SampleSolveResult sample_and_solve(std::span<const Index> q, double p, double r, std::uint64_t call_seed);

  std::size_t rounds() const noexcept;
  mpc::UsageReport usage() const;

 private:
  bool fits_one_machine(std::size_t q) const noexcept { return q * record_words_ <= local_space_; }
  std::vector<Index> sample_hubs(std::span<const Index> q, double p, std::uint64_t call_seed) const;
  HubAssignment find_hubs(std::span<const Index> q, std::span<const Index> hubs, std::uint64_t call_seed) const;
  static void tally_bags(const HubAssignment& nhs, std::size_t hub_count, std::size_t capacity,
                         SampleSolveResult& out);

  SampleSolveResult run_in_process(std::span<const Index> q, double p, double r, std::uint64_t call_seed);
  SampleSolveResult run_simulated(std::span<const Index> q, double p, double r, std::uint64_t call_seed);

  PointRecord record_of(Index pos) const;

  const PointSet* points_;
  PipelineConfig config_;
  LshParams lsh_;
  std::size_t local_space_ = 1;
  std::size_t record_words_ = 1;
  std::size_t capacity_ = 1;
  std::size_t half_machines_ = 1;
  std::optional<mpc::Cluster<PointRecord>> cluster_;
  std::vector<Index> resident_;  // sorted positions held by the cluster
};

}  // namespace kcenter
