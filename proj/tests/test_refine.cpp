#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kcenter/error.hpp"
#include "kcenter/greedy.hpp"
#include "kcenter/planted.hpp"
#include "kcenter/refine.hpp"
#include "kcenter/schedule.hpp"
#include "kcenter/seed.hpp"
#include "kcenter/wrappers.hpp"
#include "oracles.hpp"

using namespace kcenter;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("no error raised");
  return Error(ErrorKind::kIo, "");
}

bool nested(const std::vector<StageTrace>& trace, std::size_t n) {
  std::size_t prev = n;
  for (const auto& s : trace) {
    if (s.output_size > s.input_size || s.input_size != prev) return false;
    prev = s.output_size;
  }
  return true;
}

}  // namespace

TEST_CASE("iterated logarithms") {
  CHECK(iter_log(1000.0, 0) == 1000.0);
  CHECK(iter_log(65536.0, 2) == 4.0);
  CHECK(iter_log(10.0, 5) == 2.0);
  CHECK(iter_log(65536.0, 1) == 16.0);
  CHECK(log_star(16.0) == 3);
  CHECK(log_star(2.0) == 1);
  CHECK(log_star(1.0) == 0);
  CHECK(log_star(65536.0) == 4);
  CHECK(log_star_of_pow2(65536.0) == 5);
  CHECK(log_star_of_pow2(16.0) == log_star(65536.0));
}

TEST_CASE("center count threshold") {
  // log2 log2 of 10 is below 2, so L clamps to 2: ceil(1.5 k) + 64.
  for (std::size_t k : {1, 4, 7, 10, 333}) {
    CHECK(center_count_threshold(k, 10, 2, 8.0) == static_cast<std::size_t>(std::ceil(1.5 * k)) + 64);
  }
  CHECK(center_count_threshold(10000, 65536, 1, 8.0) == 43393);
  std::size_t prev = 0;
  for (std::size_t k = 1; k < 3000; k += 37) {
    const std::size_t t = center_count_threshold(k, 20000, 1, 8.0);
    CHECK(t >= prev);
    prev = t;
  }
  CHECK_THROWS_AS(center_count_threshold(0, 10, 1, 8.0), Error);
}

TEST_CASE("alpha clamp and defaults") {
  CHECK(clamp_alpha(5, 20000, 3) == 1);
  CHECK(clamp_alpha(0, 20000, 3) == 1);
  // log_star(2^65536 - ish) is out of reach; with c0 = 0 the cap is log_star(n) itself.
  CHECK(clamp_alpha(9, 65536, 0) == 4);
  CHECK(clamp_alpha(2, 65536, 0) == 2);

  CHECK(default_phi(1.0) == 1);
  CHECK(default_phi(8.0) == 4);
  CHECK(default_phi(9.0) == 5);
  CHECK(default_psi(1024, 50.0, 1.0) == 10);
  CHECK(default_psi(2, 2.0, 1.0) == 1);
}

TEST_CASE("uniform schedule") {
  const ScheduleConstants c;
  // log2 log2 4 = 1 lifts to the clamp value 2.
  const auto u4 = UniformSchedule::make(4.0, 1000, 0.5, c);
  CHECK(u4.tau == 2);
  REQUIRE(u4.s.size() == 3);
  CHECK(u4.s[1] == doctest::Approx(2.0));
  CHECK(u4.p[1] == doctest::Approx(0.5));
  CHECK(u4.p[0] == doctest::Approx(std::min(1.0, 2.0 * std::log2(1000.0) / std::sqrt(1000.0))));

  const auto u = UniformSchedule::make(65536.0, 65536, 0.5, c);
  CHECK(u.tau == 4);
  for (std::size_t i = 1; i <= u.tau; ++i) {
    CHECK(u.s[i] < u.s[i - 1]);
    CHECK(u.p[i] > 0.0);
    CHECK(u.p[i] <= 1.0);
  }
  CHECK_THROWS_AS(UniformSchedule::make(0.5, 10, 0.5, c), Error);
}

TEST_CASE("ext schedule invariants") {
  const ScheduleConstants c;
  for (std::size_t n : {12, 500, 20000, 65536, 1000000}) {
    for (std::size_t d : {1, 2, 5}) {
      for (std::size_t alpha : {1, 2, 3}) {
        const auto e = ExtSchedule::make(n, d, alpha, 3.0, 0.5, c);
        REQUIRE(e.t.size() == alpha + 1);
        CHECK(e.t[0] == static_cast<double>(n));
        for (std::size_t j = 1; j <= alpha; ++j) CHECK(e.t[j] <= e.t[j - 1]);
        for (std::size_t j = 0; j < alpha; ++j) {
          CHECK(e.r_stage[j] * iter_log(e.t[j], 2) == doctest::Approx(3.0).epsilon(1e-14));
        }
        CHECK(e.beta >= 1);
        CHECK(e.beta == static_cast<std::size_t>(std::ceil(2.0 * iter_log(static_cast<double>(n), alpha + 1))));

        double sum = 0.0;
        std::size_t calls = e.beta;
        for (std::size_t j = 0; j < alpha; ++j) {
          sum += e.r_stage[j] * static_cast<double>(e.uniform[j].tau);
          calls += e.uniform[j].tau;
        }
        CHECK(e.cost_certificate(4.0) == doctest::Approx(16.0 * (sum + static_cast<double>(e.beta) * 3.0)));
        CHECK(e.sample_solve_calls() == calls);
      }
    }
  }
  CHECK_THROWS_AS(ExtSchedule::make(100, 2, 0, 1.0, 0.5, c), Error);
  CHECK_THROWS_AS(ExtSchedule::make(100, 2, 1, 0.0, 0.5, c), Error);
}

TEST_CASE("uniform_center cost and nesting") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = generate_planted(15, 1500, 2, 1.0, 100.0, 40 + seed);
    Engine e(inst.points, PipelineConfig{});
    const auto all = oracle::all(inst.points);
    for (double t : {4.0, 100.0, 1500.0}) {
      const auto res = uniform_center(e, all, inst.r_star, t, seed);
      const double bound = 4.0 * e.c_rho() * inst.r_star * static_cast<double>(res.schedule.tau);
      CHECK(res.cost_bound == doctest::Approx(bound));
      CHECK(oracle::cost_scan(inst.points, all, res.centers) <= bound * (1 + 1e-9));
      CHECK(res.trace.size() == res.schedule.tau);
      CHECK(res.trace.front().stage == "uniform.iter1");
      CHECK(nested(res.trace, all.size()));
      CHECK(std::includes(all.begin(), all.end(), res.centers.begin(), res.centers.end()));
    }
  }
}

TEST_CASE("uniform_center on a set that fits one machine is one greedy call") {
  const auto inst = generate_planted(3, 600, 2, 1.0, 100.0, 2);
  PipelineConfig cfg;
  cfg.constants.c_tau = 0.01;
  Engine e(inst.points, cfg);
  const std::vector<Index> v{5, 50, 51, 300, 301, 599};
  const auto res = uniform_center(e, v, 1.0, 4.0, 9);
  REQUIRE(res.schedule.tau == 1);
  CHECK(res.centers == [&] {
    auto g = greedy(inst.points, v, 5, 1.0, e.c_rho());
    std::sort(g.begin(), g.end());
    return g;
  }());
}

TEST_CASE("ext_k_center with alpha = 1") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = generate_planted(20, 2000, 2, 1.0, 100.0, 70 + seed);
    Engine e(inst.points, PipelineConfig{});
    const auto res = ext_k_center(e, 3, 2.0 * inst.r_star, seed);
    CHECK(res.alpha_requested == 3);
    CHECK(res.alpha_used == 1);
    const auto all = oracle::all(inst.points);
    const double measured = oracle::cost_scan(inst.points, all, res.centers);
    CHECK(measured == doctest::Approx(res.cost).epsilon(1e-12));
    CHECK(within_certificate(measured, res.cost_certificate));
    CHECK(res.trace.size() == res.schedule.sample_solve_calls());
    CHECK(nested(res.trace, all.size()));
    CHECK(res.trace.front().stage == "phase1.1.iter1");
    CHECK(res.trace.back().stage == "phase2." + std::to_string(res.schedule.beta));
    CHECK(res.rounds == e.rounds());
    for (const auto& s : res.trace) CHECK(s.measured_cost <= s.measured_cost_bound * (1 + 1e-9));
    CHECK(e.usage().peak_local_words <= e.local_space());
  }
}

TEST_CASE("ext_k_center with alpha = 2 when the clamp is off") {
  const auto inst = generate_planted(10, 3000, 2, 1.0, 100.0, 5);
  Engine e(inst.points, PipelineConfig{});
  ExtOptions opt;
  opt.clamp_alpha = false;
  const auto res = ext_k_center(e, 2, 2.0, 3, opt);
  CHECK(res.alpha_used == 2);
  bool saw_phase12 = false;
  for (const auto& s : res.trace) saw_phase12 |= s.stage.rfind("phase1.2.", 0) == 0;
  CHECK(saw_phase12);
  CHECK(within_certificate(oracle::cost_scan(inst.points, oracle::all(inst.points), res.centers),
                           res.cost_certificate));
}

TEST_CASE("ext_k_center failures carry the stage") {
  const auto inst = generate_planted(5, 2000, 2, 1.0, 100.0, 6);
  PipelineConfig cfg;
  cfg.constants.c_p = 1e-12;
  Engine e(inst.points, cfg);
  const Error err = error_of([&] { ext_k_center(e, 1, 1.0, 0); });
  CHECK(err.kind() == ErrorKind::kSampleFailed);
  CHECK(err.stage() == "phase1.1.iter1");
}

TEST_CASE("pick_smallest") {
  using S = std::optional<std::size_t>;
  const std::vector<S> sizes{812, 799, 805, std::nullopt, 799};
  CHECK(pick_smallest(sizes) == S{1});
  CHECK(pick_smallest(std::vector<S>{std::nullopt, 3}) == S{1});
  CHECK_FALSE(pick_smallest(std::vector<S>{std::nullopt, std::nullopt}).has_value());
  CHECK_FALSE(pick_smallest(std::vector<S>{}).has_value());
}

TEST_CASE("Ext' with psi = 1 equals one ext_k_center run") {
  const auto inst = generate_planted(12, 1500, 2, 1.0, 100.0, 8);
  const PipelineConfig cfg;
  const auto rep = ext_k_center_repeat(inst.points, cfg, 1, 2.0, 1, 77);
  Engine e(inst.points, cfg);
  const auto single = ext_k_center(e, 1, 2.0, derive_seed(77, {0x726570, 0}));
  CHECK(rep.best.centers == single.centers);
  CHECK(rep.best_index == 0);
  CHECK(rep.rounds == single.rounds);
  CHECK(rep.repetitions.size() == 1);
}

TEST_CASE("Ext' keeps the smallest survivor and survives partial failure") {
  // p_0 close to 1/n: each run finds no hub with probability around 1/e.
  const auto inst = generate_planted(4, 1200, 2, 1.0, 100.0, 9);
  PipelineConfig cfg;
  cfg.constants.c_p = std::sqrt(1200.0) / (1200.0 * std::log2(1200.0));
  bool mixed = false;
  for (std::uint64_t seed = 0; seed < 20 && !mixed; ++seed) {
    RepeatResult rep;
    try {
      rep = ext_k_center_repeat(inst.points, cfg, 1, 2.0, 6, seed);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kAllRepetitionsFailed);
      continue;
    }
    std::size_t failed = 0;
    std::vector<std::optional<std::size_t>> sizes;
    for (const auto& r : rep.repetitions) {
      failed += !r.centers.has_value();
      if (!r.centers) CHECK(r.error.rfind("SampleFailed at phase", 0) == 0);
      sizes.push_back(r.centers);
    }
    CHECK(rep.best_index == *pick_smallest(sizes));
    CHECK(rep.best.centers.size() == *rep.repetitions[rep.best_index].centers);
    mixed = failed > 0 && failed < rep.repetitions.size();
  }
  CHECK(mixed);

  cfg.constants.c_p = 1e-12;
  CHECK(error_of([&] { ext_k_center_repeat(inst.points, cfg, 1, 2.0, 3, 1); }).kind() ==
        ErrorKind::kAllRepetitionsFailed);
  CHECK(error_of([&] { ext_k_center_repeat(inst.points, PipelineConfig{}, 1, 2.0, 0, 1); }).kind() ==
        ErrorKind::kInvalidParams);
}

TEST_CASE("Ext' is independent of the thread count") {
  const auto inst = generate_planted(8, 1500, 2, 1.0, 100.0, 10);
  const auto a = ext_k_center_repeat(inst.points, PipelineConfig{}, 1, 2.0, 4, 5, 1);
  const auto b = ext_k_center_repeat(inst.points, PipelineConfig{}, 1, 2.0, 4, 5, 3);
  CHECK(a.best.centers == b.best.centers);
  CHECK(a.best_index == b.best_index);
  CHECK(a.rounds == b.rounds);
  CHECK(a.peak_global_words == b.peak_global_words);
}

TEST_CASE("Ext'' search") {
  const auto inst = generate_planted(6, 800, 2, 1.0, 100.0, 11);
  WrapperConfig w;
  w.k = 800;
  w.psi = 2;
  const auto res = ext_k_center_search(inst.points, PipelineConfig{}, 1, w, 3);
  const double delta = inst.points.delta_diameter();
  CHECK(res.phi == default_phi(delta));
  CHECK(res.ladder.front().r == delta);
  for (std::size_t i = 1; i < res.ladder.size(); ++i) CHECK(res.ladder[i].r == res.ladder[i - 1].r / 2);
  // Threshold exceeds n, so every entry is feasible and the last one wins.
  CHECK(res.threshold > 800);
  CHECK(res.chosen_index == res.phi - 1);
  CHECK(res.chosen_r == res.ladder.back().r);
  for (const auto& e : res.ladder) CHECK(e.feasible == std::optional<bool>(true));
  CHECK(res.centers == res.chosen.best.centers);
  CHECK_FALSE(res.outside_regime);

  w.k = 6;
  CHECK(ext_k_center_search(inst.points, PipelineConfig{}, 1, w, 3).outside_regime);
  CHECK(outside_analyzed_regime(10, 1024));
  CHECK_FALSE(outside_analyzed_regime(100, 1024));
}

TEST_CASE("Ext'' stops at the first infeasible radius") {
  const auto inst = generate_planted(50, 1500, 2, 1.0, 100.0, 12);
  PipelineConfig cfg;
  cfg.constants.c_add = 0.0;
  WrapperConfig w;
  w.k = 50;
  w.psi = 1;
  const auto res = ext_k_center_search(inst.points, cfg, 1, w, 4);
  CHECK(*res.ladder[res.chosen_index].feasible);
  CHECK(res.chosen_index + 1 < res.phi);
  CHECK(res.centers.size() <= res.threshold);
  bool after_infeasible = false;
  for (std::size_t i = 0; i < res.ladder.size(); ++i) {
    const auto& e = res.ladder[i];
    if (after_infeasible) CHECK_FALSE(e.evaluated);
    if (e.evaluated && !*e.feasible) {
      after_infeasible = true;
      CHECK(i == res.chosen_index + 1);
    }
  }

  w.full_ladder = true;
  const auto full = ext_k_center_search(inst.points, cfg, 1, w, 4);
  for (const auto& e : full.ladder) CHECK(e.evaluated);
  CHECK(full.chosen_index == res.chosen_index);
  CHECK(full.centers == res.centers);
}

TEST_CASE("Ext'' errors") {
  const auto inst = generate_planted(5, 600, 2, 1.0, 100.0, 13);
  // One uniform call and one phase-2 call keep roughly a quarter of the points.
  PipelineConfig cfg;
  cfg.constants.c_add = 0.0;
  cfg.constants.c_tau = 0.01;
  cfg.constants.c_beta = 0.01;
  cfg.constants.c_p = 100.0;
  WrapperConfig w;
  w.k = 1;
  w.psi = 1;
  CHECK(error_of([&] { ext_k_center_search(inst.points, cfg, 1, w, 0); }).kind() == ErrorKind::kNoFeasibleRadius);

  PipelineConfig fail;
  fail.constants.c_p = 1e-12;
  CHECK(error_of([&] { ext_k_center_search(inst.points, fail, 1, w, 0); }).kind() ==
        ErrorKind::kAllRepetitionsFailed);
  w.k = 0;
  CHECK(error_of([&] { ext_k_center_search(inst.points, PipelineConfig{}, 1, w, 0); }).kind() ==
        ErrorKind::kInvalidParams);
}
