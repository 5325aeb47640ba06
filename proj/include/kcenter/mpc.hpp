#pragma once

// Round-synchronous simulation of a Massively Parallel Computation cluster.
//
// Machines hold bounded word stores. A round runs one program per machine on
// its local store, then delivers every message at the barrier. Sorting,
// prefix sums and broadcasts are O(1)-round black boxes charged a flat
// `primitive_round_cost`. Every operation validates the per-machine space
// and communication caps before it commits, so a failed operation leaves
// the cluster untouched.

#include <algorithm>
#include <array>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "kcenter/error.hpp"
#include "kcenter/seed.hpp"

namespace kcenter::mpc {

struct MpcConfig {
  std::size_t n = 0;
  double delta = 0.5;
  double rho = 0.5;
  std::size_t local_space_words = 1;  // S
  std::size_t machine_count = 1;      // M
  std::uint64_t seed = 0;
  std::size_t primitive_round_cost = 1;
  std::size_t host_threads = 1;

  /// S = ceil(c_s * n^delta), at least 1.
  static std::size_t local_space_for(std::size_t n, double delta, double c_s);
  /// Throws InvalidParams, or CapacityExceeded when M * S < n.
  void validate() const;
};

enum class Primitive { kSort, kPrefixSum, kBroadcast };
inline constexpr std::array<Primitive, 3> kAllPrimitives = {Primitive::kSort, Primitive::kPrefixSum,
                                                            Primitive::kBroadcast};
const char* to_string(Primitive p) noexcept;

struct RoundStats {
  std::size_t rounds_charged = 0;
  std::size_t words_sent_max = 0;
  std::size_t words_received_max = 0;

  RoundStats& operator+=(const RoundStats& o) noexcept {
    rounds_charged += o.rounds_charged;
    words_sent_max = std::max(words_sent_max, o.words_sent_max);
    words_received_max = std::max(words_received_max, o.words_received_max);
    return *this;
  }
};

struct UsageReport {
  std::size_t rounds = 0;
  std::size_t local_space_words = 0;
  std::size_t machine_count = 0;
  std::size_t peak_local_words = 0;
  /// Max over time of stored words plus the volume of any concurrently
  /// charged sub-computation.
  std::size_t peak_global_words = 0;
  /// Peak volume of charged sub-computations alone.
  std::size_t virtual_global_words = 0;
  std::map<std::string, std::size_t> primitive_counts;
};

template <class R>
concept Record = std::copyable<R> && requires(const R& r) {
  { r.words() } -> std::convertible_to<std::size_t>;
};

enum class ScanDirection { kForward, kBackward };

template <Record R>
class Cluster {
 public:
  using Store = std::vector<R>;

  /// Handle a machine program uses during one round.
  class Context {
   public:
    std::size_t machine() const noexcept { return machine_; }
    std::size_t machine_count() const noexcept { return machine_count_; }
    std::size_t round() const noexcept { return round_; }
    Store& local() noexcept { return *local_; }
    void send(std::size_t dest, R record) { outbox_->emplace_back(dest, std::move(record)); }
    /// Seeded from (cluster seed, round, machine).
    std::mt19937_64& rng() noexcept { return rng_; }

   private:
    friend class Cluster;
    Context(std::size_t machine, std::size_t machine_count, std::size_t round, Store* local,
            std::vector<std::pair<std::size_t, R>>* outbox, std::uint64_t seed)
        : machine_(machine),
          machine_count_(machine_count),
          round_(round),
          local_(local),
          outbox_(outbox),
          rng_(seed) {}

    std::size_t machine_;
    std::size_t machine_count_;
    std::size_t round_;
    Store* local_;
    std::vector<std::pair<std::size_t, R>>* outbox_;
    std::mt19937_64 rng_;
  };

  using Program = std::function<void(Context&)>;

  /// Distributes `payload` contiguously, filling machine 0 up to S words,
  /// then machine 1, and so on. Throws CapacityExceeded.
  Cluster(MpcConfig config, std::vector<R> payload) : config_(std::move(config)) {
    config_.validate();
    machines_.resize(config_.machine_count);
    reset_payload(std::move(payload));
  }

  /// Replaces the stored records (input placement; no rounds charged).
  void reset_payload(std::vector<R> payload) {
    std::vector<Store> next;
    if (!contiguous_fill(std::move(payload), next)) {
      throw Error(ErrorKind::kCapacityExceeded, "payload does not fit in M * S words");
    }
    commit(std::move(next));
  }

  const MpcConfig& config() const noexcept { return config_; }
  std::size_t machine_count() const noexcept { return machines_.size(); }
  std::size_t local_space() const noexcept { return config_.local_space_words; }
  std::size_t round_counter() const noexcept { return round_counter_; }
  const Store& machine(std::size_t m) const { return machines_.at(m); }

  std::size_t words_on(std::size_t m) const { return words_of(machines_.at(m)); }
  std::size_t record_count() const {
    std::size_t total = 0;
    for (const auto& s : machines_) total += s.size();
    return total;
  }

  /// All records in machine order (driver-side read, not a round).
  std::vector<R> gather() const {
    std::vector<R> out;
    out.reserve(record_count());
    for (const auto& s : machines_) out.insert(out.end(), s.begin(), s.end());
    return out;
  }

  RoundStats run_round(const Program& program) {
    const std::size_t m_count = machines_.size();
    const std::size_t cap = config_.local_space_words;
    std::vector<Store> staged = machines_;
    std::vector<std::vector<std::pair<std::size_t, R>>> outbox(m_count);

    auto run_machine = [&](std::size_t m) {
      Context ctx(m, m_count, round_counter_, &staged[m], &outbox[m],
                  derive_seed(config_.seed, {0x726f756eULL, round_counter_, m}));
      program(ctx);
    };
    for_each_machine(run_machine);

    RoundStats stats{1, 0, 0};
    std::vector<std::size_t> received(m_count, 0);
    for (std::size_t m = 0; m < m_count; ++m) {
      std::size_t sent = 0;
      for (const auto& [dest, rec] : outbox[m]) {
        if (dest >= m_count) {
          throw Error(ErrorKind::kCommViolation, "machine " + std::to_string(m) + " sent to unknown machine " +
                                                     std::to_string(dest));
        }
        sent += rec.words();
        received[dest] += rec.words();
      }
      if (sent > cap) {
        throw Error(ErrorKind::kCommViolation, "machine " + std::to_string(m) + " sends " + std::to_string(sent) +
                                                   " words > S = " + std::to_string(cap));
      }
      stats.words_sent_max = std::max(stats.words_sent_max, sent);
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      if (received[m] > cap) {
        throw Error(ErrorKind::kCommViolation, "machine " + std::to_string(m) + " receives " +
                                                   std::to_string(received[m]) + " words > S = " +
                                                   std::to_string(cap));
      }
      stats.words_received_max = std::max(stats.words_received_max, received[m]);
    }
    for (std::size_t m = 0; m < m_count; ++m) {
      for (auto& [dest, rec] : outbox[m]) staged[dest].push_back(std::move(rec));
    }
    check_space(staged);
    commit(std::move(staged));
    round_counter_ += 1;
    return stats;
  }

  /// Globally sorts records (stable) and refills machines contiguously.
  template <class Less>
  RoundStats sort(Less less) {
    std::vector<R> all = gather();
    std::stable_sort(all.begin(), all.end(), less);
    return relayout(std::move(all), Primitive::kSort);
  }

  /// Inclusive scan in global order. `same_segment(prev, cur)` decides
  /// whether `cur` continues the running value of `prev`; a segment boundary
  /// restarts the scan. Charged as one prefix-sum invocation.
  template <class Extract, class Combine, class Assign, class SameSegment>
  RoundStats segmented_scan(Extract extract, Combine combine, Assign assign, SameSegment same_segment,
                            ScanDirection direction = ScanDirection::kForward) {
    std::vector<Store> next = machines_;
    std::vector<R*> order;
    order.reserve(record_count());
    for (auto& s : next) {
      for (auto& r : s) order.push_back(&r);
    }
    if (direction == ScanDirection::kBackward) std::reverse(order.begin(), order.end());

    using T = std::decay_t<decltype(extract(*order.front()))>;
    if (!order.empty()) {
      std::vector<T> running;
      running.reserve(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        T v = extract(*order[i]);
        if (i > 0 && same_segment(*order[i - 1], *order[i])) v = combine(running.back(), v);
        running.push_back(std::move(v));
      }
      for (std::size_t i = 0; i < order.size(); ++i) assign(*order[i], running[i]);
    }
    check_space(next);
    RoundStats stats = primitive_stats(next);
    commit(std::move(next));
    charge(Primitive::kPrefixSum);
    return stats;
  }

  template <class Extract, class Assign>
  RoundStats prefix_sum(Extract extract, Assign assign) {
    return segmented_scan(
        extract, [](const auto& a, const auto& b) { return a + b; }, assign,
        [](const R&, const R&) { return true; });
  }

  /// Every machine appends a copy of `value`. SpaceViolation if any machine
  /// cannot hold it.
  RoundStats broadcast(const R& value) {
    std::vector<Store> next = machines_;
    for (auto& s : next) s.push_back(value);
    check_space(next);
    RoundStats stats = primitive_stats(next);
    stats.words_sent_max = value.words();
    stats.words_received_max = value.words();
    commit(std::move(next));
    charge(Primitive::kBroadcast);
    return stats;
  }

  /// Machine-local computation: free in rounds, still bound by S.
  template <class Fn>
  void local_step(Fn fn) {
    std::vector<Store> next = machines_;
    for_each_machine([&](std::size_t m) { fn(m, next[m]); });
    check_space(next);
    commit(std::move(next));
  }

  /// Charges invocations of a primitive executed outside the fabric.
  RoundStats charge(Primitive kind, std::size_t invocations = 1) {
    const std::size_t rounds = invocations * config_.primitive_round_cost;
    round_counter_ += rounds;
    primitive_counts_[static_cast<std::size_t>(kind)] += invocations;
    return RoundStats{rounds, 0, 0};
  }

  /// Records the global volume of a charged sub-computation running on top
  /// of the current stored data.
  void account_virtual_global(std::size_t words) {
    virtual_peak_ = std::max(virtual_peak_, words);
    peak_global_ = std::max(peak_global_, words + words_total());
  }

  UsageReport usage() const {
    UsageReport u;
    u.rounds = round_counter_;
    u.local_space_words = config_.local_space_words;
    u.machine_count = machines_.size();
    u.peak_local_words = peak_local_;
    u.peak_global_words = peak_global_;
    u.virtual_global_words = virtual_peak_;
    for (Primitive p : kAllPrimitives) u.primitive_counts[to_string(p)] = primitive_counts_[static_cast<std::size_t>(p)];
    return u;
  }

 private:
  static std::size_t words_of(const Store& s) {
    std::size_t w = 0;
    for (const auto& r : s) w += r.words();
    return w;
  }

  std::size_t words_total() const {
    std::size_t w = 0;
    for (const auto& s : machines_) w += words_of(s);
    return w;
  }

  template <class Fn>
  void for_each_machine(Fn&& fn) {
    const std::size_t m_count = machines_.size();
    const std::size_t threads = std::min(std::max<std::size_t>(config_.host_threads, 1), m_count);
    if (threads <= 1) {
      for (std::size_t m = 0; m < m_count; ++m) fn(m);
      return;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::size_t m = t; m < m_count; m += threads) fn(m);
      });
    }
  }

  bool contiguous_fill(std::vector<R> records, std::vector<Store>& out) const {
    out.assign(machines_.size(), Store{});
    const std::size_t cap = config_.local_space_words;
    std::size_t m = 0;
    std::size_t used = 0;
    for (auto& r : records) {
      const std::size_t w = r.words();
      if (w > cap) return false;
      while (m < out.size() && used + w > cap) {
        ++m;
        used = 0;
      }
      if (m == out.size()) return false;
      out[m].push_back(std::move(r));
      used += w;
    }
    return true;
  }

  RoundStats relayout(std::vector<R> records, Primitive kind) {
    std::vector<Store> next;
    if (!contiguous_fill(std::move(records), next)) {
      throw Error(ErrorKind::kSpaceViolation, std::string(to_string(kind)) + " output does not fit in M * S words");
    }
    RoundStats stats = primitive_stats(next);
    commit(std::move(next));
    charge(kind);
    return stats;
  }

  RoundStats primitive_stats(const std::vector<Store>& next) const {
    RoundStats stats{config_.primitive_round_cost, 0, 0};
    for (std::size_t m = 0; m < machines_.size(); ++m) {
      stats.words_sent_max = std::max(stats.words_sent_max, words_of(machines_[m]));
      stats.words_received_max = std::max(stats.words_received_max, words_of(next[m]));
    }
    return stats;
  }

  void check_space(const std::vector<Store>& next) const {
    for (std::size_t m = 0; m < next.size(); ++m) {
      const std::size_t w = words_of(next[m]);
      if (w > config_.local_space_words) {
        throw Error(ErrorKind::kSpaceViolation, "machine " + std::to_string(m) + " would hold " + std::to_string(w) +
                                                    " words > S = " + std::to_string(config_.local_space_words));
      }
    }
  }

  void commit(std::vector<Store> next) {
    machines_ = std::move(next);
    std::size_t total = 0;
    for (const auto& s : machines_) {
      const std::size_t w = words_of(s);
      peak_local_ = std::max(peak_local_, w);
      total += w;
    }
    peak_global_ = std::max(peak_global_, total);
  }

  MpcConfig config_;
  std::vector<Store> machines_;
  std::size_t round_counter_ = 0;
  std::size_t peak_local_ = 0;
  std::size_t peak_global_ = 0;
  std::size_t virtual_peak_ = 0;
  std::array<std::size_t, kAllPrimitives.size()> primitive_counts_{};
};

}  // namespace kcenter::mpc
