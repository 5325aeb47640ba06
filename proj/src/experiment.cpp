#include "kcenter/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "kcenter/baselines.hpp"
#include "kcenter/error.hpp"
#include "kcenter/planted.hpp"
#include "kcenter/point_io.hpp"

namespace kcenter {

using nlohmann::json;

PlantedSpec PlantedSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  if (parts.size() != 5) throw Error(ErrorKind::kValidation, "field 'planted': expected k,n,d,rstar,sep");
  PlantedSpec p;
  try {
    std::size_t used = 0;
    auto whole = [&](const std::string& s) {
      const auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::size_t>(v);
    };
    auto real = [&](const std::string& s) {
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    };
    p.k = whole(parts[0]);
    p.n = whole(parts[1]);
    p.d = whole(parts[2]);
    p.r_star = real(parts[3]);
    p.separation = real(parts[4]);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kValidation, "field 'planted': could not parse '" + text + "'");
  }
  return p;
}

const char* to_string(OracleKind kind) noexcept {
  switch (kind) {
    case OracleKind::kAuto:
      return "auto";
    case OracleKind::kBrute:
      return "brute";
    case OracleKind::kPlanted:
      return "planted";
    case OracleKind::kGonzalez:
      return "gonzalez";
  }
  return "auto";
}

OracleKind parse_oracle(const std::string& text) {
  for (OracleKind k : {OracleKind::kAuto, OracleKind::kBrute, OracleKind::kPlanted, OracleKind::kGonzalez}) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorKind::kValidation, "field 'oracle': expected brute, planted, gonzalez or auto, got '" + text + "'");
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kValidation, "field '" + field + "': " + what);
}

std::size_t get_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) bad_field(field, "expected a non-negative integer");
  return j.get<std::size_t>();
}

double get_real(const json& j, const std::string& field) {
  if (!j.is_number()) bad_field(field, "expected a number");
  return j.get<double>();
}

std::string get_text(const json& j, const std::string& field) {
  if (!j.is_string()) bad_field(field, "expected a string");
  return j.get<std::string>();
}

bool get_flag(const json& j, const std::string& field) {
  if (!j.is_boolean()) bad_field(field, "expected true or false");
  return j.get<bool>();
}

json planted_json(const PlantedSpec& p) {
  return json{{"k", p.k}, {"n", p.n}, {"d", p.d}, {"rstar", p.r_star}, {"sep", p.separation}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kValidation, "config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;  // null keeps the default
    if (key == "input") {
      c.input = get_text(value, key);
    } else if (key == "planted") {
      if (value.is_string()) {
        c.planted = PlantedSpec::parse(value.get<std::string>());
      } else if (value.is_object()) {
        PlantedSpec p;
        for (const auto& [pk, pv] : value.items()) {
          const std::string name = "planted." + pk;
          if (pk == "k") {
            p.k = get_count(pv, name);
          } else if (pk == "n") {
            p.n = get_count(pv, name);
          } else if (pk == "d") {
            p.d = get_count(pv, name);
          } else if (pk == "rstar") {
            p.r_star = get_real(pv, name);
          } else if (pk == "sep") {
            p.separation = get_real(pv, name);
          } else {
            bad_field(name, "unknown field");
          }
        }
        c.planted = p;
      } else {
        bad_field(key, "expected \"k,n,d,rstar,sep\" or an object");
      }
    } else if (key == "k") {
      c.k = get_count(value, key);
    } else if (key == "alpha") {
      c.alpha = get_count(value, key);
    } else if (key == "delta") {
      c.delta = get_real(value, key);
    } else if (key == "rho") {
      c.rho = get_real(value, key);
    } else if (key == "seed") {
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
        if (!value.is_number_unsigned()) bad_field(key, "expected a non-negative integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else if (key == "psi") {
      c.psi = get_count(value, key);
    } else if (key == "oracle") {
      c.oracle = parse_oracle(get_text(value, key));
    } else if (key == "threads") {
      c.threads = get_count(value, key);
    } else if (key == "full_ladder") {
      c.full_ladder = get_flag(value, key);
    } else if (key == "out") {
      c.out = get_text(value, key);
    } else if (key == "csv") {
      c.csv = get_text(value, key);
    } else if (key == "trace") {
      c.trace = get_text(value, key);
    } else if (key == "usage") {
      c.usage = get_text(value, key);
    } else {
      bad_field(key, "unknown field");
    }
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j;
  j["input"] = input ? json(*input) : json(nullptr);
  j["planted"] = planted ? planted_json(*planted) : json(nullptr);
  j["k"] = k;
  j["alpha"] = alpha;
  j["delta"] = delta;
  j["rho"] = rho;
  j["seed"] = seed;
  j["psi"] = psi;
  j["oracle"] = kcenter::to_string(oracle);
  j["threads"] = threads;
  j["full_ladder"] = full_ladder;
  return j;
}

void ExperimentConfig::validate() const {
  if (input.has_value() == planted.has_value()) {
    throw Error(ErrorKind::kValidation, "field 'input'/'planted': exactly one instance source is required");
  }
  if (input && k == 0) bad_field("k", "required when reading points from a file");
  if (planted) {
    if (planted->k < 1 || planted->n < planted->k) bad_field("planted", "needs n >= k >= 1");
    if (planted->d < 1 || planted->d > kMaxDim) bad_field("planted", "d must be in [1, 8]");
    if (!(planted->r_star > 0.0)) bad_field("planted", "rstar must be positive");
    if (!(planted->separation > 2.0 * planted->r_star)) bad_field("planted", "sep must exceed 2 rstar");
  }
  if (alpha < 1) bad_field("alpha", "must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) bad_field("delta", "must lie in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0)) bad_field("rho", "must lie in (0, 1)");
  if (threads < 1) bad_field("threads", "must be >= 1");
  if (oracle == OracleKind::kPlanted && !planted) bad_field("oracle", "planted needs a planted instance");
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  ExperimentReport rep;
  rep.config = config;
  std::optional<PlantedInstance> planted;
  PointSet points;
  if (config.planted) {
    const auto& p = *config.planted;
    planted = generate_planted(p.k, p.n, p.d, p.r_star, p.separation, config.seed);
    points = planted->points;
  } else {
    const auto raw = load_point_file(*config.input);
    if (raw.size() < 2) throw Error(ErrorKind::kValidation, "field 'input': needs at least two points");
    points = normalize(raw);
  }
  rep.n = points.size();
  rep.dim = points.dim();
  rep.delta_diameter = points.delta_diameter();
  rep.k = config.k ? config.k : config.planted->k;

  PipelineConfig pc;
  pc.delta = config.delta;
  pc.rho = config.rho;
  WrapperConfig wc;
  wc.k = rep.k;
  wc.psi = config.psi;
  wc.full_ladder = config.full_ladder;
  wc.threads = config.threads;

  const SearchResult search = ext_k_center_search(points, pc, config.alpha, wc, config.seed);
  const ExtResult& best = search.chosen.best;
  rep.alpha_used = search.alpha_used;
  rep.psi = search.psi;
  rep.phi = search.phi;
  rep.c_rho = LshParams::defaults(std::max<std::size_t>(rep.n, 2), pc.rho, pc.bucket_width).c_rho;
  rep.local_space_words = search.chosen.best_usage.local_space_words;
  rep.chosen_r = search.chosen_r;
  rep.centers = search.centers;
  rep.centers_returned = search.centers.size();
  rep.cost_achieved = best.cost;
  rep.cost_certificate = best.cost_certificate;
  rep.threshold = search.threshold;
  rep.outside_analyzed_regime = search.outside_regime;
  rep.rounds_total = search.rounds_total;
  rep.rounds_chosen = best.rounds;
  rep.peak_local_words = search.peak_local_words;
  rep.peak_global_words = search.peak_global_words;
  rep.ladder = search.ladder;
  rep.trace = best.trace;
  rep.usage = search.chosen.best_usage;

  OracleKind oracle = config.oracle;
  if (oracle == OracleKind::kAuto) {
    if (brute_force_feasible(rep.n, rep.k)) {
      oracle = OracleKind::kBrute;
    } else if (planted) {
      oracle = OracleKind::kPlanted;
    } else {
      oracle = OracleKind::kGonzalez;
    }
  }
  switch (oracle) {
    case OracleKind::kBrute:
      rep.baseline_kind = "brute_force_opt";
      rep.baseline_cost = brute_force_opt(points, rep.k).opt;
      break;
    case OracleKind::kPlanted:
      rep.baseline_kind = "planted_r_star";
      rep.baseline_cost = planted->r_star;
      break;
    default: {
      rep.baseline_kind = "gonzalez";
      const auto g = gonzalez_baseline(points, rep.k);
      rep.baseline_cost = cost(points, all_indices(points), g);
      break;
    }
  }
  if (rep.baseline_cost > 0.0) {
    rep.approx_ratio = rep.cost_achieved / rep.baseline_cost;
  } else {
    rep.approx_ratio = rep.cost_achieved == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }

  if (planted) {
    std::vector<std::size_t> per(planted->k_true, 0);
    for (Index c : rep.centers) ++per[planted->membership[c]];
    ClusterStats cs;
    cs.clusters = per.size();
    for (std::size_t v : per) {
      if (v > 0) ++cs.clusters_hit;
      cs.max_centers = std::max(cs.max_centers, v);
    }
    cs.mean_centers = static_cast<double>(rep.centers.size()) / static_cast<double>(per.size());
    rep.cluster_stats = cs;
  }

  rep.wallclock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

json to_json(const mpc::UsageReport& usage) {
  json counts = json::object();
  for (const auto& [name, count] : usage.primitive_counts) counts[name] = count;
  return json{{"rounds", usage.rounds},
              {"local_space_words", usage.local_space_words},
              {"machine_count", usage.machine_count},
              {"peak_local_words", usage.peak_local_words},
              {"peak_global_words", usage.peak_global_words},
              {"virtual_global_words", usage.virtual_global_words},
              {"primitive_counts", counts}};
}

json to_json(const StageTrace& t) {
  return json{{"stage", t.stage},
              {"input_size", t.input_size},
              {"output_size", t.output_size},
              {"r_used", t.r_used},
              {"p_used", t.p_used},
              {"rounds_charged", t.rounds_charged},
              {"measured_cost_bound", t.measured_cost_bound},
              {"measured_cost", t.measured_cost}};
}

json to_json(const ExperimentReport& r, bool include_wallclock) {
  json j;
  j["config"] = r.config.to_json();
  j["n"] = r.n;
  j["dim"] = r.dim;
  j["delta_diameter"] = r.delta_diameter;
  j["k"] = r.k;
  j["alpha_used"] = r.alpha_used;
  j["psi"] = r.psi;
  j["phi"] = r.phi;
  j["c_rho"] = r.c_rho;
  j["local_space_words"] = r.local_space_words;
  j["chosen_r"] = r.chosen_r;
  j["cost_achieved"] = r.cost_achieved;
  j["cost_certificate"] = r.cost_certificate;
  j["baseline_kind"] = r.baseline_kind;
  j["opt_or_baseline"] = r.baseline_cost;
  j["approx_ratio"] = number_or_null(r.approx_ratio);
  j["centers_returned"] = r.centers_returned;
  j["threshold"] = r.threshold;
  j["outside_analyzed_regime"] = r.outside_analyzed_regime;
  j["rounds_total"] = r.rounds_total;
  j["rounds_chosen"] = r.rounds_chosen;
  j["peak_local_words"] = r.peak_local_words;
  j["peak_global_words"] = r.peak_global_words;
  json ladder = json::array();
  for (const auto& e : r.ladder) {
    ladder.push_back(json{{"r", e.r},
                          {"evaluated", e.evaluated},
                          {"feasible", e.feasible ? json(*e.feasible) : json(nullptr)},
                          {"centers", e.centers ? json(*e.centers) : json(nullptr)},
                          {"rounds", e.rounds},
                          {"error", e.error.empty() ? json(nullptr) : json(e.error)}});
  }
  j["ladder"] = ladder;
  json trace = json::array();
  for (const auto& t : r.trace) trace.push_back(to_json(t));
  j["trace"] = trace;
  j["usage"] = to_json(r.usage);
  if (r.cluster_stats) {
    j["cluster_stats"] = json{{"clusters", r.cluster_stats->clusters},
                              {"clusters_hit", r.cluster_stats->clusters_hit},
                              {"max_centers", r.cluster_stats->max_centers},
                              {"mean_centers", r.cluster_stats->mean_centers}};
  } else {
    j["cluster_stats"] = nullptr;
  }
  j["centers"] = r.centers;
  if (include_wallclock) j["wallclock_seconds"] = r.wallclock_seconds;
  return j;
}

void write_trace_jsonl(std::ostream& out, const std::vector<StageTrace>& trace) {
  for (const auto& t : trace) out << to_json(t).dump() << '\n';
}

std::string csv_header() {
  return "source,seed,n,dim,k,alpha,delta,rho,psi,phi,c_rho,chosen_r,cost_achieved,cost_certificate,"
         "baseline_kind,opt_or_baseline,approx_ratio,centers_returned,threshold,outside_analyzed_regime,"
         "rounds_total,rounds_chosen,peak_local_words,peak_global_words,wallclock_seconds";
}

std::string csv_row(const ExperimentReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? json(v).dump() : std::string(); };
  std::string source;
  if (r.config.input) {
    source = *r.config.input;
  } else if (r.config.planted) {
    const auto& p = *r.config.planted;
    source = "planted:" + std::to_string(p.k) + ":" + std::to_string(p.n) + ":" + std::to_string(p.d) + ":" +
             num(p.r_star) + ":" + num(p.separation);
  }
  if (source.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char ch : source) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    source = quoted + "\"";
  }
  std::ostringstream row;
  row << source << ',' << r.config.seed << ',' << r.n << ',' << r.dim << ',' << r.k << ',' << r.alpha_used << ','
      << num(r.config.delta) << ',' << num(r.config.rho) << ',' << r.psi << ',' << r.phi << ',' << num(r.c_rho)
      << ',' << num(r.chosen_r) << ',' << num(r.cost_achieved) << ',' << num(r.cost_certificate) << ','
      << r.baseline_kind << ',' << num(r.baseline_cost) << ',' << num(r.approx_ratio) << ',' << r.centers_returned
      << ',' << r.threshold << ',' << (r.outside_analyzed_regime ? "true" : "false") << ',' << r.rounds_total << ','
      << r.rounds_chosen << ',' << r.peak_local_words << ',' << r.peak_global_words << ','
      << num(r.wallclock_seconds);
  return row.str();
}

}  // namespace kcenter
