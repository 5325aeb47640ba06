#include "kcenter/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <memory>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "kcenter/error.hpp"
#include "kcenter/nearest_index.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

double dist(std::span<const double> p, std::span<const double> q) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double t = p[i] - q[i];
    s += t * t;
  }
  return std::sqrt(s);
}

double dist(const Point& p, const Point& q) {
  if (p.coords.size() != q.coords.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "dimensions " + std::to_string(p.coords.size()) + " and " + std::to_string(q.coords.size()));
  }
  return dist(std::span<const double>(p.coords), std::span<const double>(q.coords));
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords, std::vector<std::int64_t> ids)
    : dim_(dim), coords_(std::move(coords)), ids_(std::move(ids)) {
  if (dim_ == 0 || dim_ > kMaxDim) {
    throw Error(ErrorKind::kInvalidParams, "dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (coords_.size() != dim_ * ids_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "coordinate buffer does not match dim * n");
  }
  for (double v : coords_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidParams, "non-finite coordinate");
  }
  std::unordered_set<std::int64_t> seen(ids_.begin(), ids_.end());
  if (seen.size() != ids_.size()) throw Error(ErrorKind::kInvalidParams, "point ids are not distinct");
  refresh_extremes();
}

PointSet PointSet::from_points(const std::vector<Point>& points) {
  if (points.empty()) throw Error(ErrorKind::kEmptySet, "no points");
  const std::size_t dim = points.front().coords.size();
  std::vector<double> coords;
  std::vector<std::int64_t> ids;
  coords.reserve(points.size() * dim);
  ids.reserve(points.size());
  for (const auto& p : points) {
    if (p.coords.size() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "point " + std::to_string(p.id) + " has a different dimension");
    }
    coords.insert(coords.end(), p.coords.begin(), p.coords.end());
    ids.push_back(p.id);
  }
  return PointSet(dim, std::move(coords), std::move(ids));
}

Point PointSet::point(std::size_t i) const {
  auto c = coords(i);
  return Point{std::vector<double>(c.begin(), c.end()), ids_[i]};
}

PointSet PointSet::scaled(double factor) const {
  std::vector<double> coords = coords_;
  for (double& v : coords) v *= factor;
  return PointSet(dim_, std::move(coords), ids_);
}

PointSet PointSet::subset(std::span<const Index> members) const {
  std::vector<double> coords;
  std::vector<std::int64_t> ids;
  coords.reserve(members.size() * dim_);
  ids.reserve(members.size());
  for (Index m : members) {
    auto c = this->coords(m);
    coords.insert(coords.end(), c.begin(), c.end());
    ids.push_back(ids_[m]);
  }
  return PointSet(dim_, std::move(coords), std::move(ids));
}

void PointSet::refresh_extremes() {
  if (size() < 2) {
    delta_ = 0.0;
    min_pair_ = 0.0;
    return;
  }
  min_pair_ = closest_pair_distance(*this);
  delta_ = diameter(*this);
}

double dist_to_set(const Point& p, const PointSet& s) {
  if (s.empty()) throw Error(ErrorKind::kEmptySet, "distance to an empty set");
  if (p.coords.size() != s.dim()) throw Error(ErrorKind::kDimensionMismatch, "point and set dimensions differ");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) best = std::min(best, dist(p.coords, s.coords(i)));
  return best;
}

double cost(const PointSet& points, const PointSet& centers) {
  if (centers.empty()) throw Error(ErrorKind::kEmptySet, "cost against an empty center set");
  if (points.empty()) return 0.0;
  if (points.dim() != centers.dim()) throw Error(ErrorKind::kDimensionMismatch, "point and center dimensions differ");
  const auto all = all_indices(centers);
  NearestIndex index(centers, all);
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) worst = std::max(worst, index.nearest(points.coords(i)).distance);
  return worst;
}

double cost(const PointSet& points, std::span<const Index> from, std::span<const Index> centers) {
  if (centers.empty()) throw Error(ErrorKind::kEmptySet, "cost against an empty center set");
  NearestIndex index(points, centers);
  double worst = 0.0;
  for (Index i : from) worst = std::max(worst, index.nearest(points.coords(i)).distance);
  return worst;
}

PointSet normalize(const PointSet& raw) {
  if (raw.size() < 2) throw Error(ErrorKind::kInvalidParams, "normalization needs at least two points");
  const double min_pair = raw.min_pair_dist();
  if (min_pair <= 0.0) throw Error(ErrorKind::kDuplicatePoints, "input contains duplicate coordinate vectors");
  return raw.scaled(1.0 / min_pair);
}

PointSet normalize(const std::vector<Point>& raw) {
  if (raw.size() < 2) throw Error(ErrorKind::kInvalidParams, "normalization needs at least two points");
  return normalize(PointSet::from_points(raw));
}

namespace {

double brute_closest_pair(const PointSet& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, dist(points.coords(i), points.coords(j)));
  }
  return best;
}

// Grid keyed by a hash of the integer cell vector. Hash collisions merge
// cells, which only adds distance checks.
class CellGrid {
 public:
  CellGrid(const PointSet& points, double width) : points_(points), width_(width) {}

  std::uint64_t key_of(std::span<const double> p, std::span<const std::int64_t> offset) const {
    std::uint64_t h = 0x51af0fd1c3a2b7e9ULL;
    for (std::size_t a = 0; a < p.size(); ++a) {
      const auto cell = static_cast<std::int64_t>(std::floor(p[a] / width_)) + offset[a];
      h = mix(h, static_cast<std::uint64_t>(cell));
    }
    return h;
  }

  void insert(Index i) {
    std::array<std::int64_t, kMaxDim> zero{};
    cells_[key_of(points_.coords(i), std::span(zero.data(), points_.dim()))].push_back(i);
  }

  double nearest_within_neighbourhood(Index i) const {
    const std::size_t dim = points_.dim();
    std::array<std::int64_t, kMaxDim> offset{};
    std::fill_n(offset.begin(), dim, -1);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
      auto it = cells_.find(key_of(points_.coords(i), std::span(offset.data(), dim)));
      if (it != cells_.end()) {
        for (Index j : it->second) best = std::min(best, dist(points_.coords(i), points_.coords(j)));
      }
      std::size_t a = 0;
      while (a < dim && offset[a] == 1) offset[a++] = -1;
      if (a == dim) break;
      ++offset[a];
    }
    return best;
  }

 private:
  const PointSet& points_;
  double width_;
  std::unordered_map<std::uint64_t, std::vector<Index>> cells_;
};

}  // namespace

double closest_pair_distance(const PointSet& points) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  if (n <= 2000) return brute_closest_pair(points);

  // Randomized incremental construction: rebuild the grid whenever the
  // current best distance shrinks; expected linear time.
  std::vector<Index> order = all_indices(points);
  std::mt19937_64 rng(0x5eed);
  std::shuffle(order.begin(), order.end(), rng);

  double best = dist(points.coords(order[0]), points.coords(order[1]));
  if (best == 0.0) return 0.0;
  auto grid = std::make_unique<CellGrid>(points, best);
  grid->insert(order[0]);
  grid->insert(order[1]);
  for (std::size_t k = 2; k < n; ++k) {
    const double d = grid->nearest_within_neighbourhood(order[k]);
    if (d < best) {
      best = d;
      if (best == 0.0) return 0.0;
      grid = std::make_unique<CellGrid>(points, best);
      for (std::size_t m = 0; m <= k; ++m) grid->insert(order[m]);
    } else {
      grid->insert(order[k]);
    }
  }
  return best;
}

double diameter(const PointSet& points) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  const std::size_t dim = points.dim();
  std::vector<double> centroid(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < dim; ++a) centroid[a] += points.coords(i)[a];
  }
  for (double& c : centroid) c /= static_cast<double>(n);

  std::vector<double> radius(n);
  for (std::size_t i = 0; i < n; ++i) radius[i] = dist(points.coords(i), centroid);
  std::vector<Index> order = all_indices(points);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return radius[a] > radius[b]; });

  // dist(a, b) <= radius[a] + radius[b] bounds every remaining pair.
  double best = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    const Index a = order[x];
    if (radius[a] + radius[order[0]] <= best) break;
    for (std::size_t y = x + 1; y < n; ++y) {
      const Index b = order[y];
      if (radius[a] + radius[b] <= best) break;
      best = std::max(best, dist(points.coords(a), points.coords(b)));
    }
  }
  return best;
}

std::vector<Index> all_indices(const PointSet& points) {
  std::vector<Index> out(points.size());
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

}  // namespace kcenter
