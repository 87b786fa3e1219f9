#pragma once

// Multipass light-atom interface: the QND scattering matrix, the dissipative
// single-pass map and the n-pass recursion with decaying coupling.

#include <cmath>
#include <functional>
#include <optional>
#include <string_view>

#include "interface_sim/gaussian.hpp"

namespace isim {

/// Per-pass physics. zeta() = epsilon + r is the total light loss per pass.
struct PassParams {
  double kappa = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double r = 0.0;

  double zeta() const { return epsilon + r; }

  /// Coupling fixed by the optical density: kappa = sqrt(alpha0 * eta).
  static PassParams from_optical_density(double alpha0, double eta, double epsilon, double r);
  /// Coupling chosen freely, e.g. for lossless (eta = zeta = 0) studies.
  static PassParams from_coupling(double kappa, double eta, double epsilon, double r);

  /// Throws ParameterError when a probability is outside [0, 1) or zeta >= 1.
  void validate() const;
};

enum class Scheme { Unswitched, Switched, UnswitchedThenDisentangle, SwitchedThenDisentangle };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view text);
bool is_switched(Scheme scheme);
bool has_disentangle_pass(Scheme scheme);

struct ProtocolState {
  CovarianceMatrix gamma;
  int pass_count = 0;
  double jx_factor = 1.0;  // prod (1 - eta)
  double sx_factor = 1.0;  // prod (1 - zeta)

  /// Coupling available to the next pass given the undecayed value.
  double coupling(double kappa) const { return kappa * std::sqrt(jx_factor * sx_factor); }
};

/// Identity with kappa at (x_at, p_ph) and (x_ph, p_at).
Mat4 scattering_matrix(double kappa);

/// diag(2, 2, 1, 1).
const Vec4& default_noise();

/// D' M gamma M^T D' + D noise, D = diag(eta, eta, zeta, zeta), D' = sqrt(1 - D),
/// M = S(kappa) or S(kappa)^T.
CovarianceMatrix single_pass(const CovarianceMatrix& gamma, double kappa, double eta, double zeta, bool transposed,
                             const Vec4& noise = default_noise());

/// Local rotation angles (atoms, light) from {+-pi/2}^2 that conjugate S(kappa)
/// into S(kappa)^T. Found once by exhaustive check.
std::pair<double, double> switching_angles();

struct ProtocolOptions {
  /// Undecayed coupling of the final decoupling pass; required for the
  /// disentangle schemes.
  std::optional<double> disentangle_kappa;
  Vec4 noise = default_noise();
  /// Called after every pass, including the decoupling one.
  std::function<void(const ProtocolState&)> on_pass;
};

/// Iterates single_pass n times starting from vacuum. Pass m uses the coupling
/// decayed by [(1-eta)(1-zeta)]^{(m-1)/2}; the switched schemes use S^T on
/// even passes; the disentangle schemes append one S(-kappa_d)^T pass.
ProtocolState run_protocol(int n, const PassParams& params, Scheme scheme, const ProtocolOptions& options = {});

/// Lossless atomic p variance after n passes at kappa and a decoupling pass
/// at the same kappa: (1 - n kappa^2)^2 + kappa^2.
double disentangled_p_variance(int n, double kappa);

/// sqrt(n - 1/2) / n, the coupling minimizing disentangled_p_variance.
double magic_kappa(int n);

}  // namespace isim
