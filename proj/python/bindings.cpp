#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "interface_sim/measures.hpp"
#include "interface_sim/optimizer.hpp"
#include "interface_sim/physical.hpp"
#include "interface_sim/runner.hpp"

namespace py = pybind11;
using namespace isim;

namespace {

Scheme scheme_arg(const std::string& name) {
  const auto s = parse_scheme(name);
  if (!s) throw ParameterError("unknown scheme '" + name + "'");
  return *s;
}

Objective objective_arg(const std::string& name) {
  const auto o = parse_objective(name);
  if (!o) throw ParameterError("unknown objective '" + name + "'");
  return *o;
}

CovarianceMatrix cov(const Mat4& m) { return CovarianceMatrix(m); }

py::dict record_dict(const SweepRecord& r) {
  py::dict d;
  d["figure"] = r.figure;
  d["scheme"] = std::string(to_string(r.scheme));
  d["r"] = r.r;
  d["objective"] = std::string(to_string(r.objective));
  d["n"] = r.n;
  d["eta_star"] = r.eta_star;
  d["kappa"] = r.kappa;
  d["kappa_d"] = r.kappa_d;
  d["geof"] = r.geof;
  d["epr"] = r.epr;
  d["atomic_p_sq"] = r.atomic_p;
  d["light_p_sq"] = r.light_p;
  d["kappa0"] = r.kappa0;
  d["qnd_p_sq"] = r.qnd_p;
  d["objective_value"] = r.objective_value;
  d["edge_flag"] = r.at_edge;
  return d;
}

}  // namespace

PYBIND11_MODULE(_interface_sim, m) {
  m.doc() = "Gaussian model of multipass light-atom interfaces";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InvalidStateError>(m, "InvalidStateError", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("scattering_matrix", &scattering_matrix, py::arg("kappa"));

  m.def("symplectic_eigenvalues", [](const Mat4& g) { return symplectic_eigenvalues(cov(g)); }, py::arg("gamma"));

  m.def(
      "run_protocol",
      [](int n, double kappa, double eta, double epsilon, double r, const std::string& scheme,
         std::optional<double> disentangle_kappa) {
        ProtocolOptions o;
        o.disentangle_kappa = disentangle_kappa;
        return run_protocol(n, PassParams::from_coupling(kappa, eta, epsilon, r), scheme_arg(scheme), o).gamma.matrix();
      },
      py::arg("n"), py::arg("kappa"), py::arg("eta") = 0.0, py::arg("epsilon") = 0.0, py::arg("r") = 0.0,
      py::arg("scheme") = "unswitched", py::arg("disentangle_kappa") = py::none(),
      "Covariance after n passes starting from vacuum.");

  m.def("epr_variance", [](const Mat4& g) { return epr_variance(cov(g)); }, py::arg("gamma"));
  m.def("log_negativity", [](const Mat4& g) { return log_negativity(cov(g)); }, py::arg("gamma"));
  m.def(
      "geof",
      [](const Mat4& g, bool general, std::uint64_t seed) {
        GeofOptions o;
        o.seed = seed;
        return general ? geof_minimize_general(cov(g), o).value : geof_minimize(cov(g), o).value;
      },
      py::arg("gamma"), py::arg("general") = false, py::arg("seed") = 0x5eedULL,
      "Gaussian entanglement of formation in ebits.");
  m.def(
      "standard_form",
      [](const Mat4& g) {
        const StandardForm sf = standard_form(cov(g));
        return py::dict(py::arg("a") = sf.a, py::arg("b") = sf.b, py::arg("c_x") = sf.c_x, py::arg("c_p") = sf.c_p);
      },
      py::arg("gamma"));
  m.def(
      "optimal_homodyne_variance",
      [](const Mat4& g, const std::string& measured) {
        if (measured != "light" && measured != "atoms") throw ParameterError("measured must be 'light' or 'atoms'");
        return optimal_homodyne_variance(cov(g), measured == "light" ? Mode::Light : Mode::Atoms);
      },
      py::arg("gamma"), py::arg("measured") = "light");

  m.def("magic_kappa", &magic_kappa, py::arg("n"));
  m.def(
      "crude_single_pass",
      [](double alpha0) {
        const CrudeModel c = crude_single_pass(alpha0);
        return py::dict(py::arg("eta0") = c.eta0, py::arg("delta_min") = c.delta_min,
                        py::arg("eta_stationary") = c.eta_stationary, py::arg("delta_stationary") = c.delta_stationary);
      },
      py::arg("alpha0"));

  m.def(
      "optimize_eta",
      [](int n, double alpha0, double r, const std::string& scheme, const std::string& objective) {
        const OptimizationResult res = optimize_eta(n, alpha0, r, scheme_arg(scheme), objective_arg(objective));
        return py::dict(py::arg("eta_star") = res.eta_star, py::arg("kappa") = res.kappa_star,
                        py::arg("value") = res.value, py::arg("kappa_d") = res.kappa_d_star,
                        py::arg("at_bracket_edge") = res.at_bracket_edge);
      },
      py::arg("n"), py::arg("alpha0") = 25.0, py::arg("r") = 0.0, py::arg("scheme") = "unswitched",
      py::arg("objective") = "geof");

  m.def(
      "physical_params",
      [](double diameter_um, double n_atoms, double n_photons, double detuning_hz, double gamma_hz, double sigma_cm2) {
        ExperimentalSetup s;
        s.area_cm2 = cylinder_area_cm2(diameter_um * 1e-4);
        s.n_atoms = n_atoms;
        s.n_photons = n_photons;
        s.detuning_hz = detuning_hz;
        s.gamma_hwhm_hz = gamma_hz;
        s.sigma_cm2 = sigma_cm2;
        const ModelParams p = derive_model_params(s);
        return py::dict(py::arg("alpha0") = p.alpha0, py::arg("kappa") = p.pass.kappa, py::arg("eta") = p.pass.eta,
                        py::arg("epsilon") = p.pass.epsilon, py::arg("eta_over_epsilon") = p.eta_over_epsilon,
                        py::arg("warnings") = p.warnings);
      },
      py::arg("diameter_um") = 100.0, py::arg("n_atoms") = 2e6, py::arg("n_photons") = 1e7,
      py::arg("detuning_hz") = 100e6, py::arg("gamma_hz") = 2.5e6, py::arg("sigma_cm2") = 1e-9);

  m.def(
      "run_figure",
      [](int which, std::optional<int> n_max, std::optional<double> r, bool lossless, std::uint64_t seed) {
        ConfigOverrides o;
        o.n_max = n_max;
        o.reflectivity = r;
        if (lossless) o.lossless = true;
        o.seed = seed;
        py::list out;
        for (const auto& rec : run_figure(which, o)) out.append(record_dict(rec));
        return out;
      },
      py::arg("which"), py::arg("n_max") = py::none(), py::arg("r") = py::none(), py::arg("lossless") = false,
      py::arg("seed") = 0x5eedULL, "Figure preset as a list of record dicts.");
}
