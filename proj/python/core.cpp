#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kcenter/baselines.hpp"
#include "kcenter/error.hpp"
#include "kcenter/experiment.hpp"
#include "kcenter/planted.hpp"
#include "kcenter/schedule.hpp"
#include "kcenter/wrappers.hpp"

namespace py = pybind11;
using namespace kcenter;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::kDimensionMismatch, "points must be a 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto d = static_cast<std::size_t>(a.shape(1));
  std::vector<double> coords(a.data(), a.data() + n * d);
  std::vector<std::int64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::int64_t>(i);
  return PointSet(d, std::move(coords), std::move(ids));
}

Array to_array(const PointSet& p) {
  Array out({p.size(), p.dim()});
  auto* dst = out.mutable_data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = p.coords(i);
    std::copy(c.begin(), c.end(), dst + i * p.dim());
  }
  return out;
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MPC k-center pipeline";

  static PyObject* error_type = PyErr_NewException("mpc_kcenter._core.KCenterError", PyExc_RuntimeError, nullptr);
  m.attr("KCenterError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = to_string(e.kind());
      exc.attr("stage") = e.stage();
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("normalize", [](const Array& pts) { return to_array(normalize(to_points(pts))); }, py::arg("points"),
        "Rescale so the closest pair is at distance 1.");

  m.def(
      "generate_planted",
      [](std::size_t k, std::size_t n, std::size_t d, double r_star, double separation, std::uint64_t seed) {
        const auto inst = generate_planted(k, n, d, r_star, separation, seed);
        py::dict out;
        out["points"] = to_array(inst.points);
        out["r_star"] = inst.r_star;
        out["separation"] = inst.separation;
        out["membership"] = inst.membership;
        out["centers"] = inst.planted_centers;
        return out;
      },
      py::arg("k"), py::arg("n"), py::arg("d") = 2, py::arg("r_star") = 1.0, py::arg("separation") = 100.0,
      py::arg("seed") = 0);

  m.def(
      "cost",
      [](const Array& pts, const std::vector<Index>& centers) {
        const PointSet p = to_points(pts);
        return cost(p, all_indices(p), centers);
      },
      py::arg("points"), py::arg("centers"));

  m.def("gonzalez", [](const Array& pts, std::size_t k) { return gonzalez_baseline(to_points(pts), k); },
        py::arg("points"), py::arg("k"));

  m.def(
      "brute_force_opt",
      [](const Array& pts, std::size_t k) {
        const auto r = brute_force_opt(to_points(pts), k);
        return py::make_tuple(r.centers, r.opt);
      },
      py::arg("points"), py::arg("k"));

  m.def("iter_log", &iter_log, py::arg("n"), py::arg("j"));
  m.def("log_star", &log_star, py::arg("n"));
  m.def(
      "center_count_threshold",
      [](std::size_t k, std::size_t n, std::size_t alpha, double c_add) {
        return center_count_threshold(k, n, alpha, c_add);
      },
      py::arg("k"), py::arg("n"), py::arg("alpha") = 1, py::arg("c_add") = 8.0);

  m.def(
      "search",
      [](const Array& pts, std::size_t k, std::size_t alpha, std::uint64_t seed, std::size_t psi, double delta,
         double rho, std::size_t threads, bool full_ladder) {
        const PointSet p = to_points(pts);
        PipelineConfig pc;
        pc.delta = delta;
        pc.rho = rho;
        WrapperConfig w;
        w.k = k;
        w.psi = psi;
        w.threads = threads;
        w.full_ladder = full_ladder;
        SearchResult res;
        {
          py::gil_scoped_release release;
          res = ext_k_center_search(p, pc, alpha, w, seed);
        }
        py::list trace;
        for (const auto& t : res.chosen.best.trace) trace.append(from_json(to_json(t)));
        py::dict out;
        out["centers"] = res.centers;
        out["chosen_r"] = res.chosen_r;
        out["threshold"] = res.threshold;
        out["cost"] = res.chosen.best.cost;
        out["cost_certificate"] = res.chosen.best.cost_certificate;
        out["rounds_total"] = res.rounds_total;
        out["peak_local_words"] = res.peak_local_words;
        out["trace"] = trace;
        return out;
      },
      py::arg("points"), py::arg("k"), py::arg("alpha") = 1, py::arg("seed") = 0, py::arg("psi") = 0,
      py::arg("delta") = 0.5, py::arg("rho") = 0.5, py::arg("threads") = 1, py::arg("full_ladder") = false,
      "Radius search over the geometric ladder; points are used as given (normalize first).");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const auto config = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiment(config);
        }
        return to_json(rep).dump();
      },
      py::arg("config_json"), "Runs one experiment from a JSON config; returns the report as JSON text.");
}
