#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kcenter/mpc.hpp"
#include "kcenter/refine.hpp"
#include "kcenter/wrappers.hpp"

namespace kcenter {

struct PlantedSpec {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t d = 2;
  double r_star = 1.0;
  double separation = 100.0;

  /// "k,n,d,rstar,sep". Throws Validation.
  static PlantedSpec parse(const std::string& text);
};

enum class OracleKind { kAuto, kBrute, kPlanted, kGonzalez };
const char* to_string(OracleKind kind) noexcept;
OracleKind parse_oracle(const std::string& text);

struct ExperimentConfig {
  std::optional<std::string> input;
  std::optional<PlantedSpec> planted;
  std::size_t k = 0;  // 0: the planted k
  std::size_t alpha = 1;
  double delta = 0.5;
  double rho = 0.5;
  std::uint64_t seed = 0;
  std::size_t psi = 0;  // 0: default
  OracleKind oracle = OracleKind::kAuto;
  std::size_t threads = 1;
  bool full_ladder = false;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  std::optional<std::string> trace;
  std::optional<std::string> usage;

  /// Keys mirror the CLI long options. Throws Validation naming the field.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  /// Throws Validation.
  void validate() const;
};

struct ClusterStats {
  std::size_t clusters = 0;
  std::size_t clusters_hit = 0;  // planted clusters holding at least one center
  std::size_t max_centers = 0;
  double mean_centers = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::size_t n = 0;
  std::size_t dim = 0;
  double delta_diameter = 0.0;
  std::size_t k = 0;
  std::size_t alpha_used = 1;
  std::size_t psi = 1;
  std::size_t phi = 1;
  double c_rho = 0.0;
  std::size_t local_space_words = 0;
  double chosen_r = 0.0;
  double cost_achieved = 0.0;
  double cost_certificate = 0.0;
  std::string baseline_kind;
  double baseline_cost = 0.0;
  double approx_ratio = 0.0;
  std::size_t centers_returned = 0;
  std::size_t threshold = 0;
  bool outside_analyzed_regime = false;
  std::size_t rounds_total = 0;
  std::size_t rounds_chosen = 0;
  std::size_t peak_local_words = 0;
  std::size_t peak_global_words = 0;
  std::vector<LadderEntry> ladder;
  std::vector<StageTrace> trace;
  mpc::UsageReport usage;  // the chosen run
  std::optional<ClusterStats> cluster_stats;
  std::vector<Index> centers;
  double wallclock_seconds = 0.0;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

nlohmann::json to_json(const mpc::UsageReport& usage);
nlohmann::json to_json(const StageTrace& stage);
/// Full report; `include_wallclock = false` gives a run-invariant document.
nlohmann::json to_json(const ExperimentReport& report, bool include_wallclock = true);

/// One JSON object per line.
void write_trace_jsonl(std::ostream& out, const std::vector<StageTrace>& trace);
std::string csv_header();
std::string csv_row(const ExperimentReport& report);

}  // namespace kcenter
