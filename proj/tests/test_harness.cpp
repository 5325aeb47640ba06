#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kcenter/baselines.hpp"
#include "kcenter/error.hpp"
#include "kcenter/experiment.hpp"
#include "kcenter/planted.hpp"
#include "kcenter/point_io.hpp"
#include "oracles.hpp"

using namespace kcenter;
using nlohmann::json;

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

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("kcenter_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PointSet rep_points(const ExperimentConfig& c) {
  const auto& p = *c.planted;
  return generate_planted(p.k, p.n, p.d, p.r_star, p.separation, c.seed).points;
}

}  // namespace

TEST_CASE("planted instances") {
  const auto one = generate_planted(1, 300, 2, 1.0, 100.0, 1);
  CHECK(one.points.size() == 300);
  const auto c0 = one.points.coords(one.planted_centers[0]);
  for (std::size_t i = 0; i < 300; ++i) CHECK(dist(one.points.coords(i), c0) <= one.r_star * (1 + 1e-12));

  const auto each = generate_planted(40, 40, 2, 1.0, 100.0, 2);
  CHECK(each.points.size() == 40);
  CHECK(closest_pair_distance(each.points) == doctest::Approx(1.0));

  const auto inst = generate_planted(50, 5000, 2, 1.0, 100.0, 3);
  REQUIRE(inst.membership.size() == 5000);
  CHECK(inst.k_true == 50);
  CHECK(inst.separation == doctest::Approx(100.0 * inst.r_star));
  std::vector<std::size_t> counts(50, 0);
  for (std::size_t i = 0; i < 5000; ++i) {
    const auto c = inst.membership[i];
    ++counts[c];
    CHECK(oracle::dist_ld(inst.points.coords(i), inst.points.coords(inst.planted_centers[c])) <=
          inst.r_star * (1 + 1e-12));
  }
  for (auto c : counts) CHECK(c == 100);
  for (std::size_t a = 0; a < 50; ++a) {
    for (std::size_t b = a + 1; b < 50; ++b) {
      CHECK(dist(inst.points.coords(inst.planted_centers[a]), inst.points.coords(inst.planted_centers[b])) >=
            inst.separation * (1 - 1e-12));
    }
  }

  // Same seed, same instance.
  const auto again = generate_planted(50, 5000, 2, 1.0, 100.0, 3);
  CHECK(again.points.coords(4321)[1] == inst.points.coords(4321)[1]);

  CHECK(error_of([] { generate_planted(0, 10, 2, 1.0, 100.0, 0); }).kind() == ErrorKind::kInvalidParams);
  CHECK(error_of([] { generate_planted(5, 4, 2, 1.0, 100.0, 0); }).kind() == ErrorKind::kInvalidParams);
  CHECK(error_of([] { generate_planted(2, 10, 2, 1.0, 1.5, 0); }).kind() == ErrorKind::kInvalidParams);
  CHECK(error_of([] { generate_planted(30, 60, 2, 1.0, 100.0, 0, 150.0); }).kind() ==
        ErrorKind::kInfeasibleGeometry);
}

TEST_CASE("gonzalez baseline") {
  const PointSet p = oracle::uniform_points(30, 2, 10.0, 4);
  CHECK(cost(p, oracle::all(p), gonzalez_baseline(p, 30)) == 0.0);
  const auto one = gonzalez_baseline(p, 1);
  CHECK(one == std::vector<Index>{0});
  CHECK(gonzalez_baseline(p, 7).size() == 7);

  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t n = 5 + s % 8;
    const std::size_t k = 1 + s % 4;
    const PointSet q = oracle::uniform_points(n, 2, 20.0, 1000 + s);
    const double opt = oracle::brute_opt(q, k);
    CHECK(oracle::cost_scan(q, oracle::all(q), gonzalez_baseline(q, k)) <= 2.0 * opt + 1e-12);
  }
}

TEST_CASE("brute force optimum") {
  const PointSet line = oracle::line({0, 1, 10});
  const auto r = brute_force_opt(line, 2);
  CHECK(r.opt == 1.0);
  CHECK(r.centers == std::vector<Index>{0, 2});
  CHECK(brute_force_opt(line, 3).opt == 0.0);

  for (std::uint64_t s = 0; s < 10; ++s) {
    const PointSet q = oracle::uniform_points(10, 2, 20.0, 50 + s);
    const auto got = brute_force_opt(q, 3);
    CHECK(got.opt == doctest::Approx(oracle::brute_opt(q, 3)).epsilon(1e-12));
    CHECK(oracle::cost_scan(q, oracle::all(q), got.centers) == doctest::Approx(got.opt).epsilon(1e-12));
  }

  CHECK(binomial_capped(10, 3, 1e6) == 120.0);
  CHECK(std::isinf(binomial_capped(100, 50, 1e6)));
  CHECK(binomial_capped(2000, 2, 1e7) == 1999000.0);
  CHECK(brute_force_feasible(12, 4));
  CHECK_FALSE(brute_force_feasible(100, 10));
  const PointSet big = oracle::uniform_points(100, 2, 20.0, 1);
  CHECK(error_of([&] { brute_force_opt(big, 10); }).kind() == ErrorKind::kTooLarge);
}

TEST_CASE("experiment config parsing") {
  CHECK(PlantedSpec::parse("3,100,2,1,50").n == 100);
  CHECK(PlantedSpec::parse("3,100,2,1.5,50").r_star == 1.5);
  CHECK(error_of([] { PlantedSpec::parse("3,100,2"); }).kind() == ErrorKind::kValidation);
  CHECK(error_of([] { PlantedSpec::parse("3,x,2,1,50"); }).kind() == ErrorKind::kValidation);

  const auto c = ExperimentConfig::from_json(json::parse(R"({"planted": "4,200,2,1,100", "seed": 5, "psi": 2})"));
  CHECK(c.planted->k == 4);
  CHECK(c.seed == 5);
  CHECK(c.psi == 2);
  CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());

  const Error unknown = error_of([] { ExperimentConfig::from_json(json::parse(R"({"planted": "4,200,2,1,100", "kk": 3})")); });
  CHECK(unknown.kind() == ErrorKind::kValidation);
  CHECK(unknown.message().find("'kk'") != std::string::npos);

  const Error wrong_type = error_of([] { ExperimentConfig::from_json(json::parse(R"({"delta": "half"})")); });
  CHECK(wrong_type.message().find("'delta'") != std::string::npos);

  const Error no_source = error_of([] { ExperimentConfig::from_json(json::object()).validate(); });
  CHECK(no_source.kind() == ErrorKind::kValidation);

  ExperimentConfig bad = c;
  bad.delta = 1.5;
  CHECK(error_of([&] { bad.validate(); }).message().find("'delta'") != std::string::npos);
  CHECK(parse_oracle("brute") == OracleKind::kBrute);
  CHECK(error_of([] { parse_oracle("none"); }).kind() == ErrorKind::kValidation);
}

TEST_CASE("tiny experiment reports an exact ratio") {
  const auto dir = scratch_dir();
  const PointSet p = oracle::uniform_points(12, 2, 30.0, 77);
  {
    std::ofstream out(dir / "tiny.txt");
    write_points(out, p);
  }
  ExperimentConfig c;
  c.input = (dir / "tiny.txt").string();
  c.k = 3;
  c.seed = 1;
  const auto rep = run_experiment(c);
  CHECK(rep.n == 12);
  CHECK(rep.baseline_kind == "brute_force_opt");
  const PointSet norm = normalize(p);
  const double opt = oracle::brute_opt(norm, 3);
  CHECK(rep.baseline_cost == doctest::Approx(opt).epsilon(1e-12));
  CHECK(rep.approx_ratio == doctest::Approx(rep.cost_achieved / opt));
  CHECK(rep.cost_achieved == doctest::Approx(oracle::cost_scan(norm, oracle::all(norm), rep.centers)).epsilon(1e-12));
  CHECK(rep.cost_achieved <= rep.cost_certificate * (1 + 1e-9));
  CHECK(rep.centers_returned <= rep.threshold);
  CHECK_FALSE(rep.cluster_stats.has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("planted experiment and its exports") {
  ExperimentConfig c;
  c.planted = PlantedSpec::parse("8,600,2,1,100");
  c.seed = 2;
  c.psi = 2;
  const auto rep = run_experiment(c);
  CHECK(rep.k == 8);
  CHECK(rep.baseline_kind == "planted_r_star");
  REQUIRE(rep.cluster_stats.has_value());
  CHECK(rep.cluster_stats->clusters == 8);
  CHECK(rep.outside_analyzed_regime);

  c.oracle = OracleKind::kGonzalez;
  const auto g = run_experiment(c);
  CHECK(g.baseline_kind == "gonzalez");
  // |T| may exceed k, so the ratio against a k-center baseline can drop below 1/2.
  const double gz = oracle::cost_scan(rep_points(c), oracle::all(rep_points(c)), gonzalez_baseline(rep_points(c), 8));
  CHECK(g.baseline_cost == doctest::Approx(gz).epsilon(1e-12));
  CHECK(g.approx_ratio == doctest::Approx(g.cost_achieved / gz));
  CHECK(g.centers == rep.centers);

  const json doc = to_json(rep, false);
  CHECK_FALSE(doc.contains("wallclock_seconds"));
  CHECK(doc["centers_returned"] == rep.centers_returned);
  CHECK(doc["trace"].size() == rep.trace.size());
  CHECK(doc["ladder"].size() == rep.phi);
  CHECK(doc["usage"]["rounds"] == rep.usage.rounds);
  // Reruns are byte-identical apart from the wallclock.
  CHECK(to_json(run_experiment(c), false).dump() == to_json(g, false).dump());

  std::ostringstream jsonl;
  write_trace_jsonl(jsonl, rep.trace);
  std::istringstream lines(jsonl.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const json t = json::parse(line);
    CHECK(t["stage"] == rep.trace[count].stage);
    CHECK(t.contains("measured_cost_bound"));
    ++count;
  }
  CHECK(count == rep.trace.size());

  const std::string header = csv_header();
  const std::string row = csv_row(rep);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("planted:8:600:2:", 0) == 0);
}

#ifdef KCENTER_CLI_PATH
TEST_CASE("command line") {
  const auto dir = scratch_dir();
  const std::string cli = KCENTER_CLI_PATH;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " 2>" + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  const auto out = dir / "report.json";
  const auto csv = dir / "report.csv";
  const auto trace = dir / "trace.jsonl";
  const auto usage = dir / "usage.json";
  CHECK(run("run --planted 4,300,2,1,100 --seed 3 --psi 1 --out " + out.string() + " --csv " + csv.string() +
            " --trace " + trace.string() + " --usage " + usage.string()) == 0);
  const json report = json::parse(slurp(out));
  CHECK(report["config"]["seed"] == 3);
  CHECK(report["baseline_kind"] == "planted_r_star");
  CHECK(json::parse(slurp(usage))["rounds"] == report["usage"]["rounds"]);
  const std::string csv_text = slurp(csv);
  CHECK(csv_text.rfind(csv_header() + "\n", 0) == 0);
  CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 2);
  std::istringstream tl(slurp(trace));
  std::string first;
  std::getline(tl, first);
  CHECK(json::parse(first)["stage"] == "phase1.1.iter1");

  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"planted": "4,300,2,1,100", "seed": 3, "psi": 1, "out": ")" << (dir / "from_cfg.json").string()
        << "\"}";
  }
  CHECK(run("run --config " + (dir / "cfg.json").string()) == 0);
  json a = json::parse(slurp(dir / "from_cfg.json"));
  json b = report;
  a.erase("wallclock_seconds");
  b.erase("wallclock_seconds");
  a["config"].erase("out");
  b["config"].erase("out");
  a["config"].erase("csv");
  b["config"].erase("csv");
  a["config"].erase("trace");
  b["config"].erase("trace");
  a["config"].erase("usage");
  b["config"].erase("usage");
  CHECK(a == b);

  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"planted": "4,300,2,1,100", "sed": 3})";
  }
  CHECK(run("run --config " + (dir / "bad.json").string()) == 2);
  CHECK(slurp(dir / "stderr.txt").find("'sed'") != std::string::npos);
  {
    std::ofstream cfg(dir / "broken.json");
    cfg << "{not json";
  }
  CHECK(run("run --config " + (dir / "broken.json").string()) == 2);
  CHECK(run("run --planted 4,300,2,1,100 --delta 2") == 2);
  CHECK(run("run --input /nonexistent/points.txt --k 2") == 2);
  CHECK(run("run --bogus") == 2);
  CHECK(run("run --planted 4,300,2,1,100 --seed 1 --psi 1 --out " + out.string()) == 0);
  std::filesystem::remove_all(dir);
}
#endif
