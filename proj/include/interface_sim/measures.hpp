#pragma once

// Figures of merit for the atom-light state: EPR variance, Gaussian
// entanglement of formation, log-negativity and quadrature squeezing.

#include <cstdint>
#include <vector>

#include "interface_sim/gaussian.hpp"

namespace isim {

/// Local-symplectic normal form: A = a 1, B = b 1, C = diag(c_x, c_p) with
/// c_x >= |c_p|.
struct StandardForm {
  double a = 1.0;
  double b = 1.0;
  double c_x = 0.0;
  double c_p = 0.0;

  CovarianceMatrix matrix() const;
};

/// 1/2 [Var(x_at - p_ph) + Var(p_at - x_ph)] in coherent units.
double epr_variance(const CovarianceMatrix& gamma);

/// Smallest symplectic eigenvalue of the partial transpose (p_ph -> -p_ph).
double partial_transpose_min_eigenvalue(const CovarianceMatrix& gamma);

/// max(0, -log2 nu~_-), in bits.
double log_negativity(const CovarianceMatrix& gamma);

/// Throws InvalidStateError when det A or det B < 1 - 1e-9.
StandardForm standard_form(const CovarianceMatrix& gamma);

/// Entanglement entropy (ebits) of a pure two-mode state whose reduced
/// states have symplectic eigenvalue nu >= 1.
double pure_state_entropy(double nu);

/// c+ log2 c+ - c- log2 c-, c+- = (delta^{-1/2} +- delta^{1/2})^2 / 4.
double entropy_from_epr(double delta);

/// Closed-form GEOF of a symmetric state (a == b); uses the mean of a and b.
double geof_symmetric(const StandardForm& sf);

/// Variance of one quadrature relative to the coherent state.
double squeezing(const CovarianceMatrix& gamma, Mode mode, Quadrature quad);

struct GeofOptions {
  int restarts = 8;
  bool symmetric_seed = true;
  std::uint64_t seed = 0x5eedULL;
  /// A start has converged when the simplex is smaller than size_tolerance
  /// or its vertex values agree within value_tolerance (ebits).
  double size_tolerance = 1e-9;
  double value_tolerance = 1e-12;
  /// Allowed negativity of gamma - gamma_pure.
  double slack = 1e-9;
  int max_iterations = 4000;
  bool record_trace = false;
};

struct GeofResult {
  double value = 0.0;
  long evaluations = 0;
  int converged_starts = 0;
  /// Running best objective after every simplex iteration (if recorded).
  std::vector<double> trace;
};

/// GEOF over the pure states L (+) L' TMS(r) (...)^T, searching the local
/// squeezings of the standard form with the squeezing r solved exactly.
GeofResult geof_minimize(const CovarianceMatrix& gamma, const GeofOptions& options = {});

/// Same quantity with the full 7-parameter family (one two-mode squeezing
/// and rotation-squeeze-rotation on each mode). Much slower.
GeofResult geof_minimize_general(const CovarianceMatrix& gamma, const GeofOptions& options = {});

inline double geof(const CovarianceMatrix& gamma, const GeofOptions& options = {}) {
  return geof_minimize(gamma, options).value;
}

}  // namespace isim
