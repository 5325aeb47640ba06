#include <random>
#include <sstream>

#include "doctest.h"
#include "kcenter/error.hpp"
#include "kcenter/geometry.hpp"
#include "kcenter/nearest_index.hpp"
#include "kcenter/point_io.hpp"
#include "oracles.hpp"

using namespace kcenter;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("dist") {
  CHECK(dist(Point{{0, 0}, 0}, Point{{3, 4}, 1}) == doctest::Approx(5.0));
  CHECK(dist(Point{{1.5, -2}, 0}, Point{{1.5, -2}, 1}) == 0.0);
  CHECK(kind_of([] { dist(Point{{0, 0}, 0}, Point{{1, 2, 3}, 1}); }) == ErrorKind::kDimensionMismatch);

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 50.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(5), b(5);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng);
    const double ours = dist(std::span<const double>(a), std::span<const double>(b));
    CHECK(std::abs(ours - static_cast<double>(oracle::dist_ld(a, b))) <= 1e-12 * std::max(1.0, ours));
  }
}

TEST_CASE("triangle inequality on random triples") {
  const PointSet p = oracle::uniform_points(60, 3, 10.0, 5);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
  for (int t = 0; t < 500; ++t) {
    const auto a = p.coords(pick(rng)), b = p.coords(pick(rng)), c = p.coords(pick(rng));
    CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-9);
  }
}

TEST_CASE("dist_to_set") {
  const PointSet s = oracle::uniform_points(50, 2, 100.0, 3);
  CHECK(dist_to_set(s.point(7), s) == 0.0);
  const PointSet single = s.subset(std::vector<Index>{4});
  const Point p{{1.0, 2.0}, 99};
  CHECK(dist_to_set(p, single) == doctest::Approx(dist(p, s.point(4))));
  CHECK(kind_of([&] { dist_to_set(p, PointSet()); }) == ErrorKind::kEmptySet);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 100);
  for (int t = 0; t < 50; ++t) {
    const Point q{{u(rng), u(rng)}, -1};
    CHECK(dist_to_set(q, s) == doctest::Approx(oracle::nearest_dist(s, q.coords, oracle::all(s))).epsilon(1e-12));
  }
}

TEST_CASE("cost") {
  const PointSet line = oracle::line({0, 10, 20});
  CHECK(cost(line, line) == 0.0);
  CHECK(cost(line, line.subset(std::vector<Index>{1})) == doctest::Approx(10.0));
  CHECK(kind_of([&] { cost(line, PointSet()); }) == ErrorKind::kEmptySet);

  const PointSet p = oracle::uniform_points(200, 2, 50.0, 8);
  std::vector<Index> centers;
  for (Index i = 0; i < 200; i += 20) centers.push_back(i);
  const double expected = oracle::cost_scan(p, oracle::all(p), centers);
  CHECK(cost(p, p.subset(centers)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(cost(p, oracle::all(p), centers) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cost never increases when centers are added") {
  const PointSet p = oracle::uniform_points(300, 2, 50.0, 21);
  std::vector<Index> centers{0};
  double prev = cost(p, oracle::all(p), centers);
  for (Index c = 10; c < 300; c += 17) {
    centers.push_back(c);
    const double now = cost(p, oracle::all(p), centers);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("normalize") {
  const PointSet a = normalize(std::vector<Point>{{{0, 0}, 0}, {{0, 2}, 1}});
  CHECK(a.coords(1)[1] == doctest::Approx(1.0));
  CHECK(a.delta_diameter() == doctest::Approx(1.0));

  const PointSet b = normalize(std::vector<Point>{{{0, 0}, 0}, {{0, 1}, 1}, {{0, 3}, 2}});
  CHECK(b.coords(2)[1] == doctest::Approx(3.0));
  CHECK(b.delta_diameter() == doctest::Approx(3.0));

  CHECK(kind_of([] { normalize(std::vector<Point>{{{1, 1}, 0}, {{1, 1}, 1}}); }) == ErrorKind::kDuplicatePoints);
  CHECK(kind_of([] { normalize(std::vector<Point>{{{1, 1}, 0}}); }) == ErrorKind::kInvalidParams);

  const PointSet raw = oracle::uniform_points(500, 2, 1000.0, 17);
  const PointSet n = normalize(raw);
  long double min_pair = std::numeric_limits<long double>::infinity();
  long double max_pair = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = i + 1; j < n.size(); ++j) {
      const long double d = oracle::dist_ld(n.coords(i), n.coords(j));
      min_pair = std::min(min_pair, d);
      max_pair = std::max(max_pair, d);
    }
  }
  CHECK(std::abs(static_cast<double>(min_pair) - 1.0) <= 1e-9);
  CHECK(n.delta_diameter() == doctest::Approx(static_cast<double>(max_pair)).epsilon(1e-12));

  const PointSet twice = normalize(n);
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t a2 = 0; a2 < 2; ++a2) CHECK(std::abs(twice.coords(i)[a2] - n.coords(i)[a2]) <= 1e-9 * std::max(1.0, std::abs(n.coords(i)[a2])));
  }
}

TEST_CASE("closest pair above the brute-force cutoff") {
  const PointSet p = oracle::uniform_points(2600, 2, 3000.0, 4);
  long double best = std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) best = std::min(best, oracle::dist_ld(p.coords(i), p.coords(j)));
  }
  CHECK(closest_pair_distance(p) == doctest::Approx(static_cast<double>(best)).epsilon(1e-12));
}

TEST_CASE("point set validation") {
  CHECK(kind_of([] { PointSet(0, {}, {}); }) == ErrorKind::kInvalidParams);
  CHECK(kind_of([] { PointSet(9, std::vector<double>(9), {0}); }) == ErrorKind::kInvalidParams);
  CHECK(kind_of([] { PointSet(2, {1, 2, 3}, {0, 1}); }) == ErrorKind::kDimensionMismatch);
  CHECK(kind_of([] { PointSet(1, {1, 2}, {5, 5}); }) == ErrorKind::kInvalidParams);
  CHECK(kind_of([] { PointSet(1, {std::nan("")}, {0}); }) == ErrorKind::kInvalidParams);
  CHECK(kind_of([] { PointSet::from_points({{{1, 2}, 0}, {{1}, 1}}); }) == ErrorKind::kDimensionMismatch);
}

TEST_CASE("kd-tree nearest and range queries match scans") {
  const PointSet p = oracle::uniform_points(700, 3, 100.0, 9);
  std::vector<Index> members;
  for (Index i = 0; i < 700; i += 3) members.push_back(i);
  NearestIndex idx(p, members);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 100);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> q{u(rng), u(rng), u(rng)};
    CHECK(idx.nearest(q).distance == doctest::Approx(oracle::nearest_dist(p, q, members)).epsilon(1e-12));
    std::vector<Index> got;
    idx.within(q, 15.0, got);
    std::sort(got.begin(), got.end());
    std::vector<Index> want;
    for (Index m : members) {
      if (oracle::dist_ld(q, p.coords(m)) <= 15.0) want.push_back(m);
    }
    CHECK(got == want);
  }
}

TEST_CASE("point file format") {
  std::istringstream in("1 2\n\n3.5   -4\n5e1 6\n");
  const auto pts = read_points(in);
  REQUIRE(pts.size() == 3);
  CHECK(pts[1].coords == std::vector<double>{3.5, -4});
  CHECK(pts[2].id == 2);
  CHECK(pts[2].coords[0] == 50.0);

  std::istringstream ragged("1 2\n3\n");
  CHECK(kind_of([&] { read_points(ragged); }) == ErrorKind::kValidation);
  std::istringstream junk("1 x\n");
  CHECK(kind_of([&] { read_points(junk); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { load_point_file("/nonexistent/points.txt"); }) == ErrorKind::kIo);

  const PointSet p = oracle::uniform_points(20, 3, 10.0, 1);
  std::stringstream io;
  write_points(io, p);
  const auto back = read_points(io);
  REQUIRE(back.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t a = 0; a < 3; ++a) CHECK(back[i].coords[a] == p.coords(i)[a]);
  }
}
