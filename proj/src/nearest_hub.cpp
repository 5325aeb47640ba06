#include "kcenter/nearest_hub.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "kcenter/error.hpp"
#include "kcenter/nearest_index.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

std::size_t HubAssignment::unassigned_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(matches.begin(), matches.end(), [](const HubMatch& m) { return m.hub == kNoHub; }));
}

namespace {

constexpr std::uint64_t kTrialTag = 0x747269616cULL;
constexpr std::uint64_t kOffsetTag = 0x6f6666736574ULL;

std::size_t level_count(double delta) {
  if (delta <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log2(delta))) + 1;
}

// Smallest eigenvalue of a symmetric d x d matrix (cyclic Jacobi).
double smallest_eigenvalue(std::vector<double> g, std::size_t d) {
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) off += g[p * d + q] * g[p * d + q];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = g[p * d + q];
        if (apq == 0.0) continue;
        const double theta = (g[q * d + q] - g[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double gkp = g[k * d + p];
          const double gkq = g[k * d + q];
          g[k * d + p] = c * gkp - sn * gkq;
          g[k * d + q] = sn * gkp + c * gkq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double gpk = g[p * d + k];
          const double gqk = g[q * d + k];
          g[p * d + k] = c * gpk - sn * gqk;
          g[q * d + k] = sn * gpk + c * gqk;
        }
      }
    }
  }
  double lo = g[0];
  for (std::size_t p = 1; p < d; ++p) lo = std::min(lo, g[p * d + p]);
  return std::max(lo, 0.0);
}

// Two points can share an f_ell bucket only if every projection differs by
// less than the bucket width W, which forces |x - y| < W sqrt(K) / s_min
// where s_min is the smallest singular value of that function's K x d
// direction matrix. Returns the largest such factor over all functions
// (infinite when some matrix is rank deficient).
double collision_reach(const LshFamily& fam) {
  const std::size_t K = fam.params().K;
  const std::size_t d = fam.dim();
  double reach = 0.0;
  std::vector<double> g(d * d);
  for (std::size_t ell = 0; ell < fam.params().L; ++ell) {
    const auto a = fam.directions(ell);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = 0; y < d; ++y) g[x * d + y] += a[k * d + x] * a[k * d + y];
      }
    }
    const double s_min = std::sqrt(smallest_eigenvalue(g, d));
    if (!(s_min > 1e-12)) return std::numeric_limits<double>::infinity();
    reach = std::max(reach, std::sqrt(static_cast<double>(K)) / s_min);
  }
  return reach;
}

// Open-addressing map from bucket key to at most `cap` hubs, kept in
// insertion order (callers insert hubs by increasing position). Slots are
// stamped with a generation so reset does not touch the arrays.
class BucketTable {
 public:
  void reset(std::size_t expected_keys, std::size_t cap) {
    std::size_t size = 16;
    while (size < 2 * expected_keys) size <<= 1;
    cap_ = cap;
    if (size != stamp_.size()) {
      mask_ = size - 1;
      keys_.assign(size, 0);
      slot_.assign(size, 0);
      stamp_.assign(size, 0);
      generation_ = 0;
    }
    ++generation_;
    count_.clear();
    hubs_.resize(expected_keys * cap);
  }

  /// Appends `hub` to the bucket of `key`; at most expected_keys buckets.
  void insert(BucketId key, Index hub) {
    const std::uint32_t b = locate(key);
    const std::uint32_t c = count_[b]++;
    if (c < cap_) hubs_[b * cap_ + c] = hub;
  }

  /// Stored hubs of the bucket and its full count.
  std::pair<std::span<const Index>, std::size_t> find(BucketId key) const {
    for (std::size_t i = key & mask_;; i = (i + 1) & mask_) {
      if (stamp_[i] != generation_) return {};
      if (keys_[i] == key) {
        const std::uint32_t b = slot_[i];
        return {{hubs_.data() + b * cap_, std::min<std::size_t>(count_[b], cap_)}, count_[b]};
      }
    }
  }

 private:
  std::uint32_t locate(BucketId key) {
    for (std::size_t i = key & mask_;; i = (i + 1) & mask_) {
      if (stamp_[i] != generation_) {
        stamp_[i] = generation_;
        keys_[i] = key;
        slot_[i] = static_cast<std::uint32_t>(count_.size());
        count_.push_back(0);
        return slot_[i];
      }
      if (keys_[i] == key) return slot_[i];
    }
  }

  std::size_t mask_ = 0;
  std::size_t cap_ = 1;
  std::uint32_t generation_ = 0;
  std::vector<BucketId> keys_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint32_t> count_;
  std::vector<Index> hubs_;
};

struct Candidate {
  std::uint32_t local = 0;  // rank of the hub in the sorted hub list
  double distance = 0.0;
};

}  // namespace

HubAssignment nearest_hub_search(const PointSet& points, std::span<const Index> members,
                                 std::span<const Index> hub_list, const LshParams& params, double delta) {
  params.validate();
  std::vector<Index> hubs(hub_list.begin(), hub_list.end());
  std::sort(hubs.begin(), hubs.end());
  hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
  if (hubs.empty()) throw Error(ErrorKind::kEmptySet, "nearest-hub search needs at least one hub");

  std::vector<char> in_q(points.size(), 0);
  std::vector<char> is_hub(points.size(), 0);
  for (Index q : members) in_q[q] = 1;
  for (Index h : hubs) {
    if (!in_q[h]) throw Error(ErrorKind::kHubNotInSet, "hub " + std::to_string(points.id(h)) + " is not in Q");
    is_hub[h] = 1;
  }

  HubAssignment out;
  const std::size_t levels = level_count(delta);
  out.stats.levels = levels;
  const double c_rho = params.c_rho;
  const std::size_t L = params.L;
  const std::size_t cap = params.max_hubs_per_bucket;
  const std::size_t dim = points.dim();

  // Lowest useful level per point: below it the c_rho 2^j filter rejects
  // every hub, so those levels return null.
  NearestIndex hub_index(points, hubs);
  std::vector<std::uint32_t> first_level;
  for (Index q : members) {
    if (is_hub[q]) continue;
    out.matches.push_back(HubMatch{q, kNoHub, 0, 0});
    const double dh = hub_index.nearest(points.coords(q)).distance;
    std::uint32_t j = 0;
    while (j < levels && c_rho * std::ldexp(1.0, static_cast<int>(j)) < dh) ++j;
    first_level.push_back(j);
  }

  std::vector<std::size_t> pending(out.matches.size());
  for (std::size_t k = 0; k < pending.size(); ++k) pending[k] = k;
  pending.erase(std::remove_if(pending.begin(), pending.end(), [&](std::size_t k) { return first_level[k] >= levels; }),
                pending.end());

  std::vector<std::uint32_t> local_of(points.size(), 0);
  for (std::size_t h = 0; h < hubs.size(); ++h) local_of[hubs[h]] = static_cast<std::uint32_t>(h);

  // Hub hashes are filled lazily, all L at once, the first time a hub is a
  // candidate at a given level. A bucket is then the set of candidates whose
  // cached id equals the query's; every hub that could collide with q is a
  // candidate, so this matches a full hash table over H.
  std::vector<BucketId> hub_hash(hubs.size() * L);
  std::vector<std::uint32_t> hub_stamp(hubs.size(), 0);
  std::uint32_t stamp = 0;
  std::vector<Index> found;
  std::vector<Candidate> cands;
  BucketTable table;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < params.I && !pending.empty(); ++i) {
    ++out.stats.trials_run;
    LshParams trial = params;
    trial.r = 1.0;
    trial.seed = derive_seed(params.seed, {kTrialTag, i});
    const LshFamily base(trial, dim);
    const double reach = collision_reach(base) * params.bucket_width_factor * (1.0 + 1e-9);

    std::uint32_t lowest = static_cast<std::uint32_t>(levels);
    for (std::size_t k : pending) lowest = std::min(lowest, first_level[k]);
    out.stats.levels_skipped += lowest;

    for (std::uint32_t j = lowest; j < levels; ++j) {
      active.clear();
      for (std::size_t k : pending) {
        if (first_level[k] <= j && out.matches[k].hub == kNoHub) active.push_back(k);
      }
      if (active.empty()) {
        ++out.stats.levels_skipped;
        continue;
      }
      ++out.stats.levels_evaluated;
      ++stamp;
      const double radius = std::ldexp(1.0, static_cast<int>(j));
      const LshFamily fam = base.at_radius(radius, derive_seed(params.seed, {kOffsetTag, i, j}));
      const double limit = c_rho * radius;
      const double search_radius = reach * radius;

      auto record = [&](HubMatch& m, Index hub) {
        m.hub = hub;
        m.trial = static_cast<std::uint32_t>(i);
        m.level = j;
      };

      // Candidate probing costs about the number of hubs near each query;
      // once that exceeds a few full passes over H the rest of the level
      // switches to one hash table per function.
      const std::size_t budget = 16 * (hubs.size() + active.size());
      std::size_t spent = 0;
      std::size_t next = 0;
      for (; next < active.size() && std::isfinite(search_radius) && spent <= budget; ++next) {
        HubMatch& m = out.matches[active[next]];
        const auto q = points.coords(m.point);
        found.clear();
        hub_index.within(q, search_radius, found);
        spent += found.size();
        cands.clear();
        for (Index h : found) {
          const std::uint32_t local = local_of[h];
          cands.push_back(Candidate{local, dist(q, points.coords(h))});
          if (hub_stamp[local] != stamp) {
            hub_stamp[local] = stamp;
            const double* hp = points.coords(h).data();
            for (std::size_t ell = 0; ell < L; ++ell) hub_hash[local * L + ell] = fam.hash_unchecked(ell, hp);
            out.stats.hub_hashes += L;
          }
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.local < y.local; });

        for (std::size_t ell = 0; ell < L; ++ell) {
          const BucketId key = fam.hash_unchecked(ell, q.data());
          std::size_t in_bucket = 0;
          const Candidate* best = nullptr;
          for (const Candidate& c : cands) {
            if (hub_hash[c.local * L + ell] != key) continue;
            if (++in_bucket > cap) {
              ++out.stats.truncated_probes;
              break;
            }
            if (c.distance > limit) continue;
            if (best == nullptr || c.distance < best->distance) best = &c;
          }
          out.stats.max_bucket_hubs = std::max(out.stats.max_bucket_hubs, std::min(in_bucket, cap));
          if (best != nullptr) {
            record(m, hubs[best->local]);
            break;
          }
        }
      }

      active.erase(active.begin(), active.begin() + static_cast<std::ptrdiff_t>(next));
      for (std::size_t ell = 0; ell < L && !active.empty(); ++ell) {
        table.reset(hubs.size(), cap);
        for (std::size_t local = 0; local < hubs.size(); ++local) {
          const BucketId key = hub_stamp[local] == stamp ? hub_hash[local * L + ell]
                                                         : fam.hash_unchecked(ell, points.coords(hubs[local]).data());
          table.insert(key, hubs[local]);
        }
        out.stats.hub_hashes += hubs.size();

        std::size_t kept = 0;
        for (std::size_t k : active) {
          HubMatch& m = out.matches[k];
          const auto q = points.coords(m.point);
          const auto [bucket, count] = table.find(fam.hash_unchecked(ell, q.data()));
          if (count > cap) ++out.stats.truncated_probes;
          out.stats.max_bucket_hubs = std::max(out.stats.max_bucket_hubs, bucket.size());
          Index best = kNoHub;
          double best_d = 0.0;
          for (Index h : bucket) {
            const double d = dist(q, points.coords(h));
            if (d > limit) continue;
            if (best == kNoHub || d < best_d) {
              best = h;
              best_d = d;
            }
          }
          if (best != kNoHub) {
            record(m, best);
          } else {
            active[kept++] = k;
          }
        }
        active.resize(kept);
      }
    }
    pending.erase(std::remove_if(pending.begin(), pending.end(),
                                 [&](std::size_t k) { return out.matches[k].hub != kNoHub; }),
                  pending.end());
  }
  out.failed = out.unassigned_count() > 0;
  return out;
}

}  // namespace kcenter
