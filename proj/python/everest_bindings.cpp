#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "everest/concentration.hpp"
#include "everest/errors.hpp"
#include "everest/estimators.hpp"
#include "everest/gas.hpp"
#include "everest/harness.hpp"

namespace py = pybind11;
using namespace everest;

namespace {

// Configs and reports cross the boundary as plain python dicts; the json
// module round-trip keeps the binding free of per-field glue.
nlohmann::json to_json(const py::object& obj) {
  const py::module json = py::module::import("json");
  return nlohmann::json::parse(
      py::cast<std::string>(json.attr("dumps")(obj)));
}

py::object from_json(const nlohmann::json& j) {
  return py::module::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_everest, m) {
  m.doc() = "Ensemble verification workbench for steady supersonic flow";

  py::register_exception<Error>(m, "EverestError");

  m.def(
      "theta_beta_m",
      [](double mach, double theta_deg, bool strong, double gamma) {
        return theta_beta_m(
            mach, theta_deg,
            strong ? ShockBranch::strong : ShockBranch::weak, gamma);
      },
      py::arg("mach"), py::arg("theta_deg"), py::arg("strong") = false,
      py::arg("gamma") = 1.4);
  m.def("max_deflection_deg", &max_deflection_deg, py::arg("mach"),
        py::arg("gamma") = 1.4);
  m.def("prandtl_meyer_nu_deg", &prandtl_meyer_nu_deg, py::arg("mach"),
        py::arg("gamma") = 1.4);
  m.def("prandtl_meyer_mach", &prandtl_meyer_mach, py::arg("nu_deg"),
        py::arg("gamma") = 1.4);
  m.def(
      "normal_shock_pressure_ratio",
      [](double mach, double gamma) {
        const auto sol =
            oblique_shock_downstream(freestream(mach, gamma), 90.0);
        return sol.downstream.p / sol.upstream.p;
      },
      py::arg("mach"), py::arg("gamma") = 1.4);

  m.def("pair_bound", &pair_bound, py::arg("distance"));
  m.def("hypercircle_estimate", &hypercircle_estimate, py::arg("distance"));
  m.def("angle_bound", &angle_bound, py::arg("distance"),
        py::arg("alpha_deg"), py::arg("exact_constant") = true);
  m.def("alpha_from_beta", &alpha_from_beta, py::arg("beta_deg"));

  m.def("scheme_names", [] {
    std::vector<std::string> names;
    for (SchemeId id :
         {SchemeId::cir1, SchemeId::rusanov1, SchemeId::maccormack,
          SchemeId::lax_wendroff2, SchemeId::muscl_hllc2, SchemeId::fromm2,
          SchemeId::weno3}) {
      names.emplace_back(scheme_name(id));
    }
    return names;
  });

  m.def(
      "validate_case",
      [](const py::object& config) {
        return from_json(validate_only(config_from_json(to_json(config))));
      },
      py::arg("config"));
  m.def(
      "run_experiment",
      [](const py::object& config, int jobs) {
        return from_json(
            run_experiment(config_from_json(to_json(config)), jobs).summary);
      },
      py::arg("config"), py::arg("jobs") = 1);
  m.def(
      "run_solve",
      [](const py::object& config, int jobs) {
        return from_json(
            run_solve(config_from_json(to_json(config)), jobs).summary);
      },
      py::arg("config"), py::arg("jobs") = 1);

  m.def(
      "mc_orthogonality",
      [](int dim, long samples, double delta, uint64_t seed, bool pairs) {
        const McResult r = mc_orthogonality(
            dim, samples, delta, seed,
            pairs ? McMethod::pairs : McMethod::radial);
        py::dict d;
        d["dim"] = r.dim;
        d["delta"] = r.delta;
        d["samples"] = r.samples;
        d["exceed_count"] = r.exceed_count;
        d["empirical"] = r.empirical;
        d["bound"] = r.bound;
        d["mean_cosine"] = r.mean_cosine;
        return d;
      },
      py::arg("dim"), py::arg("samples"), py::arg("delta"), py::arg("seed"),
      py::arg("pairs") = false);
}
