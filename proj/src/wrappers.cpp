#include "kcenter/wrappers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "kcenter/error.hpp"
#include "kcenter/schedule.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

namespace {

constexpr std::uint64_t kRepeatTag = 0x726570ULL;
constexpr std::uint64_t kLadderTag = 0x6c6164ULL;

struct Attempt {
  std::optional<ExtResult> result;
  mpc::UsageReport usage;
  std::string error;
  std::size_t rounds = 0;
};

Attempt run_once(const PointSet& points, const PipelineConfig& config, std::size_t alpha, double r,
                 std::uint64_t seed, const ExtOptions& options) {
  Attempt a;
  Engine engine(points, config);
  try {
    a.result = ext_k_center(engine, alpha, r, seed, options);
    a.rounds = a.result->rounds;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSampleFailed && e.kind() != ErrorKind::kSearchFailed) throw;
    a.error = std::string(to_string(e.kind())) + " at " + e.stage() + ": " + e.message();
    a.rounds = engine.rounds();
  }
  a.usage = engine.usage();
  return a;
}

}  // namespace

std::optional<std::size_t> pick_smallest(std::span<const std::optional<std::size_t>> sizes) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] && (!best || *sizes[i] < *sizes[*best])) best = i;
  }
  return best;
}

RepeatResult ext_k_center_repeat(const PointSet& points, const PipelineConfig& config, std::size_t alpha, double r,
                                 std::size_t psi, std::uint64_t seed, std::size_t threads,
                                 const ExtOptions& options) {
  if (psi < 1) throw Error(ErrorKind::kInvalidParams, "psi must be >= 1");
  std::vector<Attempt> attempts(psi);
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, psi);
  if (workers == 1) {
    for (std::size_t i = 0; i < psi; ++i) {
      attempts[i] = run_once(points, config, alpha, r, derive_seed(seed, {kRepeatTag, i}), options);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = next++; i < psi; i = next++) {
              attempts[i] = run_once(points, config, alpha, r, derive_seed(seed, {kRepeatTag, i}), options);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RepeatResult out;
  out.psi = psi;
  std::vector<std::optional<std::size_t>> sizes;
  for (std::size_t i = 0; i < psi; ++i) {
    const Attempt& a = attempts[i];
    RepetitionOutcome o;
    o.error = a.error;
    o.rounds = a.rounds;
    if (a.result) o.centers = a.result->centers.size();
    sizes.push_back(o.centers);
    out.repetitions.push_back(std::move(o));
    out.rounds = std::max(out.rounds, a.rounds);
    out.peak_local_words = std::max(out.peak_local_words, a.usage.peak_local_words);
    out.peak_global_words += a.usage.peak_global_words;
  }
  const auto best = pick_smallest(sizes);
  if (!best) {
    throw Error(ErrorKind::kAllRepetitionsFailed,
                "all " + std::to_string(psi) + " repetitions failed; first: " + attempts.front().error);
  }
  out.best_index = *best;
  out.best = std::move(*attempts[*best].result);
  out.best_usage = attempts[*best].usage;
  return out;
}

bool outside_analyzed_regime(std::size_t k, std::size_t n) noexcept {
  const double l = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
  return static_cast<double>(k) < l * l;
}

SearchResult ext_k_center_search(const PointSet& points, const PipelineConfig& config, std::size_t alpha,
                                 const WrapperConfig& wrapper, std::uint64_t seed) {
  if (wrapper.k < 1) throw Error(ErrorKind::kInvalidParams, "k must be >= 1");
  const std::size_t n = points.size();
  const double delta = std::max(points.delta_diameter(), 1.0);
  SearchResult out;
  out.alpha_used = wrapper.ext.clamp_alpha ? clamp_alpha(alpha, n, config.constants.c0) : std::max<std::size_t>(alpha, 1);
  out.psi = wrapper.psi ? wrapper.psi : default_psi(n, delta, config.constants.c_psi);
  out.phi = wrapper.phi ? wrapper.phi : default_phi(delta);
  out.threshold = center_count_threshold(wrapper.k, n, out.alpha_used, config.constants.c_add);
  out.outside_regime = outside_analyzed_regime(wrapper.k, n);

  for (std::size_t i = 0; i < out.phi; ++i) {
    LadderEntry e;
    e.r = std::ldexp(delta, -static_cast<int>(i));
    out.ladder.push_back(e);
  }

  std::optional<RepeatResult> chosen;
  bool seen_infeasible = false;
  for (std::size_t i = 0; i < out.phi; ++i) {
    LadderEntry& entry = out.ladder[i];
    entry.evaluated = true;
    std::optional<RepeatResult> rep;
    try {
      rep = ext_k_center_repeat(points, config, alpha, entry.r, out.psi, derive_seed(seed, {kLadderTag, i}),
                                wrapper.threads, wrapper.ext);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kAllRepetitionsFailed || i == 0) throw;
      entry.error = e.message();
      entry.feasible = false;
    }
    if (rep) {
      entry.centers = rep->best.centers.size();
      entry.rounds = rep->rounds;
      entry.feasible = rep->best.centers.size() <= out.threshold;
      out.rounds_total += rep->rounds;
      out.peak_local_words = std::max(out.peak_local_words, rep->peak_local_words);
      out.peak_global_words = std::max(out.peak_global_words, rep->peak_global_words);
    }
    if (*entry.feasible) {
      if (!seen_infeasible) {
        chosen = std::move(rep);
        out.chosen_index = i;
      }
    } else {
      if (i == 0) {
        throw Error(ErrorKind::kNoFeasibleRadius, "r(1) = " + std::to_string(entry.r) + " yields " +
                                                      std::to_string(*entry.centers) + " centers > threshold " +
                                                      std::to_string(out.threshold));
      }
      seen_infeasible = true;
      if (!wrapper.full_ladder) break;
    }
  }
  out.chosen = std::move(*chosen);
  out.chosen_r = out.ladder[out.chosen_index].r;
  out.centers = out.chosen.best.centers;
  return out;
}

}  // namespace kcenter
