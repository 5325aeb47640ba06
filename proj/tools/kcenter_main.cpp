// kcenter: command-line front end for the k-center pipeline.
//
//   kcenter run --planted 256,20000,2,1,100 --seed 3 --out report.json

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kcenter/error.hpp"
#include "kcenter/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kValidation = 2, kPipelineFailure = 3, kInfeasibleRadius = 4 };

int exit_code_for(kcenter::ErrorKind kind) {
  using kcenter::ErrorKind;
  switch (kind) {
    case ErrorKind::kAllRepetitionsFailed:
    case ErrorKind::kSampleFailed:
    case ErrorKind::kSearchFailed:
      return kPipelineFailure;
    case ErrorKind::kNoFeasibleRadius:
      return kInfeasibleRadius;
    case ErrorKind::kValidation:
    case ErrorKind::kInvalidParams:
    case ErrorKind::kIo:
    case ErrorKind::kDuplicatePoints:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kEmptySet:
    case ErrorKind::kTooLarge:
    case ErrorKind::kInfeasibleGeometry:
      return kValidation;
    default:
      return kInternal;
  }
}

template <class T>
void write_file(const std::string& path, T&& writer) {
  std::ofstream out(path);
  if (!out) throw kcenter::Error(kcenter::ErrorKind::kIo, "cannot write " + path);
  writer(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPC k-center pipeline"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run the radius search on one instance and write a report");

  std::string config_path, input, planted, oracle, out, csv, trace, usage;
  std::size_t k = 0, alpha = 0, psi = 0, threads = 0;
  double delta = 0.0, rho = 0.0;
  std::uint64_t seed = 0;
  bool full_ladder = false;

  run->add_option("--config", config_path, "JSON config with the same keys as the options")->check(CLI::ExistingFile);
  run->add_option("--input", input, "Point file: one point per line, whitespace-separated coordinates");
  run->add_option("--planted", planted, "Planted instance k,n,d,rstar,sep");
  run->add_option("--k", k, "Target number of centers");
  run->add_option("--alpha", alpha, "Trade-off parameter alpha (clamped to [1, log* n - 3])");
  run->add_option("--delta", delta, "Local-space exponent");
  run->add_option("--rho", rho, "LSH exponent");
  run->add_option("--seed", seed, "Root seed");
  run->add_option("--psi", psi, "Repetitions per radius (default ceil(log2 max(n, log2 Delta)))");
  run->add_option("--oracle", oracle, "Denominator: brute, planted, gonzalez or auto");
  run->add_option("--threads", threads, "Repetitions evaluated concurrently");
  run->add_flag("--full-ladder", full_ladder, "Evaluate every radius on the ladder");
  run->add_option("--out", out, "Report JSON path");
  run->add_option("--csv", csv, "CSV export path");
  run->add_option("--trace", trace, "Stage trace JSONL path");
  run->add_option("--usage", usage, "MPC usage report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw kcenter::Error(kcenter::ErrorKind::kValidation, std::string("config is not valid JSON: ") + e.what());
      }
    }
    auto set = [&](const char* name, const char* key, auto value) {
      if (run->count(name) > 0) j[key] = value;
    };
    set("--input", "input", input);
    set("--planted", "planted", planted);
    set("--k", "k", k);
    set("--alpha", "alpha", alpha);
    set("--delta", "delta", delta);
    set("--rho", "rho", rho);
    set("--seed", "seed", seed);
    set("--psi", "psi", psi);
    set("--oracle", "oracle", oracle);
    set("--threads", "threads", threads);
    set("--out", "out", out);
    set("--csv", "csv", csv);
    set("--trace", "trace", trace);
    set("--usage", "usage", usage);
    if (full_ladder) j["full_ladder"] = true;

    const auto config = kcenter::ExperimentConfig::from_json(j);
    const auto report = kcenter::run_experiment(config);
    const auto doc = kcenter::to_json(report);

    if (config.out) {
      write_file(*config.out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    } else {
      std::cout << doc.dump(2) << '\n';
    }
    if (config.csv) {
      write_file(*config.csv, [&](std::ostream& o) { o << kcenter::csv_header() << '\n' << kcenter::csv_row(report) << '\n'; });
    }
    if (config.trace) {
      write_file(*config.trace, [&](std::ostream& o) { kcenter::write_trace_jsonl(o, report.trace); });
    }
    if (config.usage) {
      write_file(*config.usage, [&](std::ostream& o) { o << kcenter::to_json(report.usage).dump(2) << '\n'; });
    }
    std::cerr << "centers " << report.centers_returned << " (threshold " << report.threshold << "), r "
              << report.chosen_r << ", cost " << report.cost_achieved << ", ratio vs " << report.baseline_kind << " "
              << report.approx_ratio << '\n';
    return kOk;
  } catch (const kcenter::Error& e) {
    std::cerr << "kcenter: " << kcenter::to_string(e.kind());
    if (!e.stage().empty()) std::cerr << " at " << e.stage();
    std::cerr << ": " << e.message() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "kcenter: " << e.what() << '\n';
    return kInternal;
  }
}
