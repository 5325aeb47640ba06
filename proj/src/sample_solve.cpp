#include "kcenter/sample_solve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "kcenter/error.hpp"
#include "kcenter/greedy.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

namespace {

constexpr std::uint64_t kHubCoinTag = 0x636f696eULL;
constexpr std::uint64_t kSearchTag = 0x6e6873ULL;

using Cluster = mpc::Cluster<PointRecord>;
using Store = Cluster::Store;

std::vector<Index> sorted_copy(std::span<const Index> v) {
  std::vector<Index> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Index> positions_of(const std::vector<PointRecord>& records) {
  std::vector<Index> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.pos);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::kInvalidParams, "delta must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kInvalidParams, "rho must lie in (0, 1)");
  if (!(c_s > 0.0)) throw Error(ErrorKind::kInvalidParams, "c_s must be positive");
  if (primitive_round_cost < 1) throw Error(ErrorKind::kInvalidParams, "primitive_round_cost must be >= 1");
  if (!(bucket_width > 0.0)) throw Error(ErrorKind::kInvalidParams, "bucket_width must be positive");
  if (max_hubs_per_bucket < 1) throw Error(ErrorKind::kInvalidParams, "max_hubs_per_bucket must be >= 1");
}

Engine::Engine(const PointSet& points, PipelineConfig config) : points_(&points), config_(std::move(config)) {
  config_.validate();
  if (points.empty()) throw Error(ErrorKind::kEmptySet, "no points");
  const std::size_t n = points.size();
  lsh_ = LshParams::defaults(std::max<std::size_t>(n, 2), config_.rho, config_.bucket_width);
  lsh_.max_hubs_per_bucket = config_.max_hubs_per_bucket;
  record_words_ = 2 * points.dim() + 6;
  // Tiny inputs get room for two records so bags can still be split.
  local_space_ = std::max(mpc::MpcConfig::local_space_for(n, config_.delta, config_.c_s), 2 * record_words_);
  capacity_ = local_space_ / record_words_;
  // Slots for parts (at most 2 per point) plus one mirror machine per slot
  // range for parts that straddle a boundary.
  half_machines_ = (2 * n + capacity_ - 1) / capacity_ + 1;
  if (config_.mode == ExecutionMode::kSimulated) {
    mpc::MpcConfig mc;
    mc.n = n;
    mc.delta = config_.delta;
    mc.rho = config_.rho;
    mc.local_space_words = local_space_;
    mc.machine_count = 2 * half_machines_;
    mc.seed = 0;
    mc.primitive_round_cost = config_.primitive_round_cost;
    mc.host_threads = config_.host_threads;
    cluster_.emplace(mc, std::vector<PointRecord>{});
  }
}

PointRecord Engine::record_of(Index pos) const {
  PointRecord rec;
  rec.pos = pos;
  rec.dim = static_cast<std::uint8_t>(points_->dim());
  const auto c = points_->coords(pos);
  std::copy(c.begin(), c.end(), rec.coords.begin());
  return rec;
}

void Engine::load(std::span<const Index> members) {
  resident_ = sorted_copy(members);
  if (!cluster_) return;
  std::vector<PointRecord> payload;
  payload.reserve(resident_.size());
  for (Index pos : resident_) payload.push_back(record_of(pos));
  cluster_->reset_payload(std::move(payload));
}

std::size_t Engine::rounds() const noexcept { return cluster_ ? cluster_->round_counter() : 0; }

mpc::UsageReport Engine::usage() const {
  if (cluster_) return cluster_->usage();
  mpc::UsageReport u;
  u.local_space_words = local_space_;
  u.machine_count = machine_count();
  return u;
}

std::vector<Index> Engine::sample_hubs(std::span<const Index> q, double p, std::uint64_t call_seed) const {
  std::vector<Index> hubs;
  for (Index x : q) {
    if (unit_interval(mix(derive_seed(call_seed, {kHubCoinTag}), x)) < p) hubs.push_back(x);
  }
  std::sort(hubs.begin(), hubs.end());
  return hubs;
}

HubAssignment Engine::find_hubs(std::span<const Index> q, std::span<const Index> hubs,
                                std::uint64_t call_seed) const {
  LshParams params = lsh_;
  params.seed = derive_seed(call_seed, {kSearchTag});
  return nearest_hub_search(*points_, q, hubs, params, points_->delta_diameter());
}

void Engine::tally_bags(const HubAssignment& nhs, std::size_t hub_count, std::size_t capacity,
                        SampleSolveResult& out) {
  std::map<Index, std::size_t> sizes;
  for (const auto& m : nhs.matches) ++sizes[m.hub];
  out.bags = hub_count;
  out.parts = hub_count - sizes.size();  // hubs with empty bags
  for (const auto& [hub, others] : sizes) {
    const std::size_t parts = split_part_count(others + 1, capacity);
    out.parts += parts;
    if (parts > 1) ++out.split_bags;
  }
  out.nhs = nhs.stats;
}

SampleSolveResult Engine::sample_and_solve(std::span<const Index> q, double p, double r, std::uint64_t call_seed) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidParams, "sampling probability must lie in (0, 1]");
  if (!(r > 0.0)) throw Error(ErrorKind::kInvalidParams, "radius must be positive");
  if (q.empty()) throw Error(ErrorKind::kEmptySet, "sample-and-solve on an empty set");
  const std::vector<Index> members = sorted_copy(q);
  if (std::adjacent_find(members.begin(), members.end()) != members.end()) {
    throw Error(ErrorKind::kInvalidParams, "Q contains repeated points");
  }
  if (members.back() >= points_->size()) throw Error(ErrorKind::kInvalidParams, "Q refers to unknown points");
  if (config_.mode == ExecutionMode::kInProcess) return run_in_process(members, p, r, call_seed);
  if (members != resident_) load(members);
  return run_simulated(members, p, r, call_seed);
}

SampleSolveResult Engine::run_in_process(std::span<const Index> q, double p, double r, std::uint64_t call_seed) {
  SampleSolveResult out;
  const double threshold = 4.0 * c_rho() * r;
  if (fits_one_machine(q.size())) {
    out.single_machine = true;
    out.centers = greedy_threshold(*points_, q, q.front(), threshold);
    std::sort(out.centers.begin(), out.centers.end());
    return out;
  }
  out.hubs = sample_hubs(q, p, call_seed);
  if (out.hubs.empty()) throw Error(ErrorKind::kSampleFailed, "no point was sampled as a hub");
  HubAssignment nhs = find_hubs(q, out.hubs, call_seed);
  if (nhs.failed) {
    throw Error(ErrorKind::kSearchFailed,
                std::to_string(nhs.unassigned_count()) + " points found no hub in any trial");
  }
  tally_bags(nhs, out.hubs.size(), capacity_, out);

  std::map<Index, Bag> bags;
  for (Index h : out.hubs) bags[h] = Bag{h, {h}, {}};
  for (const auto& m : nhs.matches) bags[m.hub].members.push_back(m.point);
  for (auto& [hub, bag] : bags) {
    std::vector<std::vector<Index>> parts;
    if (bag.members.size() <= capacity_) {
      parts.push_back(bag.members);
    } else {
      parts = split_bag(std::move(bag), capacity_).parts;
    }
    for (const auto& part : parts) {
      const auto g = greedy_threshold(*points_, part, hub, threshold);
      out.centers.insert(out.centers.end(), g.begin(), g.end());
    }
  }
  std::sort(out.centers.begin(), out.centers.end());
  out.centers.erase(std::unique(out.centers.begin(), out.centers.end()), out.centers.end());
  out.matches = std::move(nhs.matches);
  return out;
}

SampleSolveResult Engine::run_simulated(std::span<const Index> q, double p, double r, std::uint64_t call_seed) {
  Cluster& cl = *cluster_;
  const std::size_t start_rounds = cl.round_counter();
  const std::size_t cap = capacity_;
  const double threshold = 4.0 * c_rho() * r;
  const PointSet& pts = *points_;
  SampleSolveResult out;

  auto finish = [&] {
    out.centers = positions_of(cl.gather());
    resident_ = out.centers;
    out.rounds = cl.round_counter() - start_rounds;
  };

  if (fits_one_machine(q.size())) {
    out.single_machine = true;
    cl.run_round([](Cluster::Context& ctx) {
      for (auto& rec : ctx.local()) ctx.send(0, rec);
      ctx.local().clear();
    });
    cl.local_step([&](std::size_t m, Store& s) {
      if (m != 0 || s.empty()) return;
      std::vector<Index> members;
      for (const auto& rec : s) members.push_back(rec.pos);
      const Index first = *std::min_element(members.begin(), members.end());
      auto g = greedy_threshold(pts, members, first, threshold);
      std::sort(g.begin(), g.end());
      std::erase_if(s, [&](const PointRecord& rec) { return !std::binary_search(g.begin(), g.end(), rec.pos); });
    });
    finish();
    return out;
  }

  // Hub coins are local; the hub count is a prefix sum whose total is
  // broadcast so every machine learns whether sampling failed.
  const std::uint64_t coin_seed = derive_seed(call_seed, {kHubCoinTag});
  cl.local_step([&](std::size_t, Store& s) {
    for (auto& rec : s) {
      rec.a = unit_interval(mix(coin_seed, rec.pos)) < p ? 1 : 0;
      rec.hub = rec.a ? rec.pos : kNoHub;
      if (rec.a) rec.hub_coords = rec.coords;
    }
  });
  cl.prefix_sum([](const PointRecord& rec) { return rec.a; }, [](PointRecord& rec, std::uint64_t v) { rec.b = v; });
  cl.charge(mpc::Primitive::kBroadcast);
  std::vector<PointRecord> snapshot = cl.gather();
  for (const auto& rec : snapshot) {
    if (rec.a) out.hubs.push_back(rec.pos);
  }
  if (snapshot.empty() || snapshot.back().b == 0) {
    throw Error(ErrorKind::kSampleFailed, "no point was sampled as a hub");
  }
  std::sort(out.hubs.begin(), out.hubs.end());

  // Nearest-hub search runs in-process and is charged as its sort and
  // prefix-sum pipeline over the (i, j, l) tuple volume.
  HubAssignment nhs = find_hubs(q, out.hubs, call_seed);
  cl.charge(mpc::Primitive::kBroadcast);
  cl.charge(mpc::Primitive::kSort, 3);
  cl.charge(mpc::Primitive::kPrefixSum, 3);
  cl.account_virtual_global(lsh_.I * nhs.stats.levels * lsh_.L * q.size() * (pts.dim() + 3));
  if (nhs.failed) {
    throw Error(ErrorKind::kSearchFailed,
                std::to_string(nhs.unassigned_count()) + " points found no hub in any trial");
  }
  tally_bags(nhs, out.hubs.size(), cap, out);
  std::vector<Index> hub_of(pts.size(), kNoHub);
  for (const auto& m : nhs.matches) hub_of[m.point] = m.hub;
  cl.local_step([&](std::size_t, Store& s) {
    for (auto& rec : s) {
      if (!rec.a) rec.hub = hub_of[rec.pos];
    }
  });

  // Bags become contiguous runs: hub first, then members by position.
  cl.sort([](const PointRecord& x, const PointRecord& y) {
    if (x.hub != y.hub) return x.hub < y.hub;
    if (x.a != y.a) return x.a > y.a;
    return x.pos < y.pos;
  });

  struct RankCoords {
    std::uint64_t rank;
    std::array<double, kMaxDim> coords;
  };
  const auto same_bag = [](const PointRecord& x, const PointRecord& y) { return x.hub == y.hub; };
  cl.segmented_scan(
      [](const PointRecord& rec) { return RankCoords{1, rec.hub_coords}; },
      [](const RankCoords& acc, const RankCoords& x) { return RankCoords{acc.rank + x.rank, acc.coords}; },
      [](PointRecord& rec, const RankCoords& v) {
        rec.c = v.rank - 1;
        rec.hub_coords = v.coords;
      },
      same_bag);
  // Scanning backwards, the last member's rank + 1 is the bag size.
  cl.segmented_scan([](const PointRecord& rec) { return rec.c + 1; },
                    [](std::uint64_t acc, std::uint64_t) { return acc; },
                    [](PointRecord& rec, std::uint64_t v) { rec.d = v; }, same_bag, mpc::ScanDirection::kBackward);

  // Slot layout: every part gets one slot per member plus one for its hub
  // copy (part 0 already holds the hub itself).
  const auto part_of = [cap](const PointRecord& rec) { return split_part_of(rec.c, rec.d, cap); };
  cl.local_step([&](std::size_t, Store& s) {
    for (auto& rec : s) {
      const std::size_t part = part_of(rec);
      const bool opens_part = part > 0 && (rec.c - 1) % (cap - 1) == 0;
      rec.a = opens_part ? 2 : 1;
    }
  });
  cl.prefix_sum([](const PointRecord& rec) { return rec.a; }, [](PointRecord& rec, std::uint64_t v) { rec.b = v; });
  cl.segmented_scan([](const PointRecord& rec) { return rec.b - rec.a; },
                    [](std::uint64_t acc, std::uint64_t) { return acc; },
                    [](PointRecord& rec, std::uint64_t v) { rec.a = v; },
                    [&](const PointRecord& x, const PointRecord& y) {
                      return x.hub == y.hub && part_of(x) == part_of(y);
                    });

  const std::size_t half = half_machines_;
  cl.run_round([&](Cluster::Context& ctx) {
    for (auto& rec : ctx.local()) {
      const std::size_t part = part_of(rec);
      const std::size_t start = rec.a;
      const std::size_t len = split_part_size(part, rec.d, cap);
      const std::size_t m = start / cap;
      ctx.send(start % cap + len > cap ? half + m : m, rec);
    }
    ctx.local().clear();
  });

  cl.local_step([&](std::size_t, Store& s) {
    if (s.empty()) return;
    std::sort(s.begin(), s.end(), [&](const PointRecord& x, const PointRecord& y) {
      if (x.hub != y.hub) return x.hub < y.hub;
      const auto px = part_of(x);
      const auto py = part_of(y);
      if (px != py) return px < py;
      return x.pos < y.pos;
    });
    Store kept;
    for (std::size_t lo = 0; lo < s.size();) {
      std::size_t hi = lo;
      while (hi < s.size() && s[hi].hub == s[lo].hub && part_of(s[hi]) == part_of(s[lo])) ++hi;
      const Index hub = s[lo].hub;
      std::vector<Index> members;
      bool has_hub = false;
      for (std::size_t i = lo; i < hi; ++i) {
        members.push_back(s[i].pos);
        has_hub = has_hub || s[i].pos == hub;
      }
      std::optional<PointRecord> copy;
      if (!has_hub) {
        copy = s[lo];
        copy->pos = hub;
        copy->coords = copy->hub_coords;
        copy->copy = true;
        members.push_back(hub);
      }
      auto g = greedy_threshold(pts, members, hub, threshold);
      std::sort(g.begin(), g.end());
      for (std::size_t i = lo; i < hi; ++i) {
        if (std::binary_search(g.begin(), g.end(), s[i].pos)) kept.push_back(s[i]);
      }
      if (copy) kept.push_back(*copy);
      lo = hi;
    }
    s = std::move(kept);
  });

  // Hub copies chosen by several parts collapse to one record.
  cl.sort([](const PointRecord& x, const PointRecord& y) {
    if (x.pos != y.pos) return x.pos < y.pos;
    return x.copy < y.copy;
  });
  cl.segmented_scan([](const PointRecord&) { return std::uint64_t{1}; },
                    [](std::uint64_t acc, std::uint64_t x) { return acc + x; },
                    [](PointRecord& rec, std::uint64_t v) { rec.a = v; },
                    [](const PointRecord& x, const PointRecord& y) { return x.pos == y.pos; });
  cl.local_step([&](std::size_t, Store& s) {
    std::erase_if(s, [](const PointRecord& rec) { return rec.a > 1; });
    for (auto& rec : s) {
      rec.hub = kNoHub;
      rec.copy = false;
      rec.a = rec.b = rec.c = rec.d = 0;
    }
  });

  out.matches = std::move(nhs.matches);
  finish();
  return out;
}

}  // namespace kcenter
