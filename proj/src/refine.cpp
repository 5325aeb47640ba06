#include "kcenter/refine.hpp"

#include <algorithm>

#include "kcenter/error.hpp"
#include "kcenter/seed.hpp"

namespace kcenter {

bool within_certificate(double cost, double bound) noexcept {
  return cost <= bound + kDistTolerance * std::max(1.0, bound);
}

namespace {

constexpr std::uint64_t kUniformTag = 0x756e69ULL;
constexpr std::uint64_t kPhase1Tag = 0x7031ULL;
constexpr std::uint64_t kPhase2Tag = 0x7032ULL;

// Runs one Sample-And-Solve call as a traced stage and checks that the
// output is nested in the input and that the reference cost stays within the
// running certificate.
class StageRunner {
 public:
  StageRunner(Engine& engine, std::span<const Index> reference, bool check)
      : engine_(engine), reference_(reference), check_(check) {}

  std::vector<Index> run(const std::string& stage, std::span<const Index> input, double p, double r,
                         std::uint64_t call_seed) {
    SampleSolveResult res;
    try {
      res = engine_.sample_and_solve(input, p, r, call_seed);
    } catch (const Error& e) {
      throw e.with_stage(stage);
    }
    bound_ += 4.0 * engine_.c_rho() * r;
    StageTrace t;
    t.stage = stage;
    t.input_size = input.size();
    t.output_size = res.centers.size();
    t.r_used = r;
    t.p_used = p;
    t.rounds_charged = res.rounds;
    t.measured_cost_bound = bound_;
    t.measured_cost = cost(engine_.points(), reference_, res.centers);
    if (check_) {
      if (!std::includes(input.begin(), input.end(), res.centers.begin(), res.centers.end())) {
        throw Error(ErrorKind::kValidation, "stage output is not a subset of its input", stage);
      }
      if (!within_certificate(t.measured_cost, bound_)) {
        throw Error(ErrorKind::kValidation,
                    "measured cost " + std::to_string(t.measured_cost) + " exceeds certificate " +
                        std::to_string(bound_),
                    stage);
      }
    }
    trace_.push_back(std::move(t));
    return std::move(res.centers);
  }

  double bound() const noexcept { return bound_; }
  std::vector<StageTrace>& trace() noexcept { return trace_; }

 private:
  Engine& engine_;
  std::span<const Index> reference_;
  bool check_;
  double bound_ = 0.0;
  std::vector<StageTrace> trace_;
};

std::vector<Index> sorted_members(std::span<const Index> v) {
  std::vector<Index> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

UniformResult uniform_center(Engine& engine, std::span<const Index> v, double r, double t, std::uint64_t seed) {
  const std::vector<Index> input = sorted_members(v);
  if (input.empty()) throw Error(ErrorKind::kEmptySet, "uniform-center on an empty set");
  const auto& cfg = engine.config();
  UniformResult out;
  out.schedule = UniformSchedule::make(t, engine.points().size(), cfg.delta, cfg.constants);
  StageRunner runner(engine, input, true);
  std::vector<Index> s = input;
  for (std::size_t i = 1; i <= out.schedule.tau; ++i) {
    s = runner.run("uniform.iter" + std::to_string(i), s, out.schedule.p[i - 1], r,
                   derive_seed(seed, {kUniformTag, i}));
  }
  out.centers = std::move(s);
  out.cost_bound = runner.bound();
  out.cost = cost(engine.points(), input, out.centers);
  out.trace = std::move(runner.trace());
  return out;
}

ExtResult ext_k_center(Engine& engine, std::size_t alpha, double r, std::uint64_t seed, const ExtOptions& options) {
  const PointSet& pts = engine.points();
  const auto& cfg = engine.config();
  const std::size_t n = pts.size();
  ExtResult out;
  out.alpha_requested = alpha;
  out.alpha_used = options.clamp_alpha ? clamp_alpha(alpha, n, cfg.constants.c0) : std::max<std::size_t>(alpha, 1);
  out.schedule = ExtSchedule::make(n, pts.dim(), out.alpha_used, r, cfg.delta, cfg.constants);
  out.cost_certificate = out.schedule.cost_certificate(engine.c_rho());

  const std::vector<Index> all = all_indices(pts);
  engine.load(all);
  const std::size_t start_rounds = engine.rounds();
  StageRunner runner(engine, all, options.check_certificate);

  std::vector<Index> t = all;
  for (std::size_t j = 1; j <= out.alpha_used; ++j) {
    const auto& u = out.schedule.uniform[j - 1];
    const double rj = out.schedule.r_stage[j - 1];
    for (std::size_t i = 1; i <= u.tau; ++i) {
      t = runner.run("phase1." + std::to_string(j) + ".iter" + std::to_string(i), t, u.p[i - 1], rj,
                     derive_seed(seed, {kPhase1Tag, j, i}));
    }
  }
  for (std::size_t i = 1; i <= out.schedule.beta; ++i) {
    t = runner.run("phase2." + std::to_string(i), t, 0.5, r, derive_seed(seed, {kPhase2Tag, i}));
  }

  out.centers = std::move(t);
  out.cost = runner.trace().empty() ? 0.0 : runner.trace().back().measured_cost;
  out.rounds = engine.rounds() - start_rounds;
  out.trace = std::move(runner.trace());
  if (options.check_certificate && !within_certificate(out.cost, out.cost_certificate)) {
    throw Error(ErrorKind::kValidation, "final cost exceeds the cost certificate", "ext");
  }
  return out;
}

}  // namespace kcenter
