#pragma once

// Laboratory quantities -> model parameters (kappa, eta, epsilon, alpha0).

#include <cstdint>
#include <string>
#include <vector>

#include "interface_sim/dynamics.hpp"

namespace isim {

/// Lengths in cm, frequencies in Hz. gamma_hwhm is used as Gamma directly.
struct ExperimentalSetup {
  double sigma_cm2 = 1e-9;
  double gamma_hwhm_hz = 2.5e6;
  double detuning_hz = 100e6;
  double area_cm2 = 0.0;
  double n_atoms = 0.0;
  double n_photons = 0.0;
  double reflectivity = 0.0;

  /// Cold Rb-87 sample: 100 um diameter, 2e6 atoms, sigma = 1e-9 cm^2,
  /// 2.5 MHz HWHM, 100 MHz detuning, 1e7 photons.
  static ExperimentalSetup rb87_example();
};

double cylinder_area_cm2(double diameter_cm);

/// alpha0 = N_at sigma / A. Independent of photons, detuning and linewidth.
double optical_density(const ExperimentalSetup& setup);

struct ModelParams {
  PassParams pass;
  double alpha0 = 0.0;
  double eta_over_epsilon = 0.0;
  std::vector<std::string> warnings;
};

/// kappa = sqrt(N_at N_ph) sigma Gamma / (A Delta),
/// eta = N_ph sigma Gamma^2 / (A Delta^2), epsilon = N_at sigma Gamma^2 / (A Delta^2).
/// Verifies kappa^2 = eta alpha0, epsilon = alpha0 (Gamma/Delta)^2 and
/// eta / epsilon = N_ph / N_at; throws ParameterError on violation.
ModelParams derive_model_params(const ExperimentalSetup& setup);

/// Photon number giving depumping `eta_target` in (0, 0.5]; setup.n_photons
/// is ignored.
std::int64_t photons_for_target_eta(const ExperimentalSetup& setup, double eta_target);

/// Detuning at which epsilon = alpha0 (Gamma / Delta)^2 equals `epsilon`.
double detuning_for_epsilon(const ExperimentalSetup& setup, double epsilon);

}  // namespace isim
