#include "interface_sim/physical.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace isim {

namespace {

void validate(const ExperimentalSetup& s, bool need_photons) {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(fmt::format("{} = {} must be positive", name, v));
  };
  positive("sigma", s.sigma_cm2);
  positive("gamma_hwhm", s.gamma_hwhm_hz);
  positive("detuning", s.detuning_hz);
  positive("area", s.area_cm2);
  positive("n_atoms", s.n_atoms);
  if (need_photons) positive("n_photons", s.n_photons);
  if (!(s.reflectivity >= 0.0 && s.reflectivity < 1.0)) {
    throw ParameterError(fmt::format("reflectivity = {} must lie in [0, 1)", s.reflectivity));
  }
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); }

}  // namespace

ExperimentalSetup ExperimentalSetup::rb87_example() {
  ExperimentalSetup s;
  s.sigma_cm2 = 1e-9;
  s.gamma_hwhm_hz = 2.5e6;
  s.detuning_hz = 100e6;
  s.area_cm2 = cylinder_area_cm2(100e-4);
  s.n_atoms = 2e6;
  s.n_photons = 1e7;
  s.reflectivity = 0.0;
  return s;
}

double cylinder_area_cm2(double diameter_cm) { return std::numbers::pi * 0.25 * diameter_cm * diameter_cm; }

double optical_density(const ExperimentalSetup& setup) { return setup.n_atoms * setup.sigma_cm2 / setup.area_cm2; }

ModelParams derive_model_params(const ExperimentalSetup& setup) {
  validate(setup, true);
  const double g = setup.gamma_hwhm_hz;
  const double d = setup.detuning_hz;
  const double sa = setup.sigma_cm2 / setup.area_cm2;
  const double jx = setup.n_atoms / 2.0;
  const double sx = setup.n_photons / 2.0;

  ModelParams out;
  out.alpha0 = optical_density(setup);
  const double kappa = 2.0 * std::sqrt(jx * sx) * sa * g / d;
  const double eta = setup.n_photons * sa * g * g / (d * d);
  const double epsilon = setup.n_atoms * sa * g * g / (d * d);
  out.pass = PassParams{kappa, eta, epsilon, setup.reflectivity};
  out.pass.validate();
  out.eta_over_epsilon = eta / epsilon;

  if (!close_rel(kappa * kappa, eta * out.alpha0)) {
    throw ParameterError(fmt::format("kappa^2 = {} differs from eta alpha0 = {}", kappa * kappa, eta * out.alpha0));
  }
  const double ratio = g / d;
  if (!close_rel(epsilon, out.alpha0 * ratio * ratio)) {
    throw ParameterError(fmt::format("epsilon = {} differs from alpha0 (Gamma/Delta)^2", epsilon));
  }
  if (!close_rel(out.eta_over_epsilon, setup.n_photons / setup.n_atoms)) {
    throw ParameterError("eta / epsilon differs from N_ph / N_at");
  }
  if (d / g < 10.0) {
    out.warnings.push_back(fmt::format("detuning / linewidth = {:.3g} is below 10", d / g));
  }
  return out;
}

std::int64_t photons_for_target_eta(const ExperimentalSetup& setup, double eta_target) {
  validate(setup, false);
  if (!(eta_target > 0.0 && eta_target <= 0.5)) {
    throw ParameterError(fmt::format("eta_target = {} must lie in (0, 0.5]", eta_target));
  }
  const double g = setup.gamma_hwhm_hz;
  const double d = setup.detuning_hz;
  return std::llround(eta_target * setup.area_cm2 * d * d / (setup.sigma_cm2 * g * g));
}

double detuning_for_epsilon(const ExperimentalSetup& setup, double epsilon) {
  validate(setup, false);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ParameterError(fmt::format("epsilon = {} must lie in (0, 1)", epsilon));
  }
  return setup.gamma_hwhm_hz * std::sqrt(optical_density(setup) / epsilon);
}

}  // namespace isim
