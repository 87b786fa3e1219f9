#pragma once

// Scalar protocol optimizations: best depumping eta per pass count, best
// decoupling coupling, and the crude single-pass squeezing model.

#include <functional>
#include <optional>
#include <string_view>

#include "interface_sim/dynamics.hpp"
#include "interface_sim/measures.hpp"

namespace isim {

enum class Objective { MaximizeGEOF, MinimizeEPR, MinimizeAtomicP, MinimizeLightP };

std::string_view to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view text);

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [lo, hi] until the bracket is narrower than tol.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol);

struct BracketSearch {
  double lo = 1e-6;
  double hi = 0.5;
  double tolerance = 1e-7;
  int grid_points = 64;
  bool log_grid = true;
};

struct BracketMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool at_edge = false;
};

/// Golden section over the whole bracket, cross-checked by a coarse grid.
/// If the grid beats the golden result by more than 1e-6 the neighbourhood
/// of the grid optimum is searched again. Never worse than the grid.
BracketMinimum robust_minimize(const std::function<double(double)>& f, const BracketSearch& search);

/// The crude single-pass model Delta(eta) = 1 / (1 + alpha0 eta) + 2 eta.
struct CrudeModel {
  /// 1 / sqrt(2 alpha0) and 2 sqrt(2 / alpha0): exact optimum of the
  /// large-density form 1 / (alpha0 eta) + 2 eta.
  double eta0 = 0.0;
  double delta_min = 0.0;
  /// Exact stationary point of the full expression,
  /// eta = (sqrt(alpha0 / 2) - 1) / alpha0.
  double eta_stationary = 0.0;
  double delta_stationary = 0.0;
};

double crude_delta(double alpha0, double eta);
double crude_delta_large_density(double alpha0, double eta);
CrudeModel crude_single_pass(double alpha0);

/// Metric values of a finished protocol run.
struct Metrics {
  double geof = 0.0;
  double epr = 0.0;
  /// Atomic p variance after the decoupling pass. Without one: the best
  /// atomic quadrature variance after homodyne detection of light at the best
  /// angle (light x for the unswitched scheme).
  double atomic_p = 0.0;
  double light_p = 0.0;
};

Metrics evaluate_metrics(const ProtocolState& state, Scheme scheme, const GeofOptions& geof_options = {});

/// Metric selected by `objective` (unsigned: GEOF is returned as is).
double objective_metric(const ProtocolState& state, Scheme scheme, Objective objective,
                        const GeofOptions& geof_options = {});

struct OptimizationResult {
  std::optional<double> eta_star;  // empty for lossless coupling searches
  double kappa_star = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool at_bracket_edge = false;
  std::optional<double> kappa_d_star;
};

struct OptimizerOptions {
  BracketSearch eta_search{};
  GeofOptions geof{};
};

/// Runs `scheme` with the decoupling coupling fixed by the scheme: equal to
/// the pass coupling for the unswitched decoupler, optimized for the
/// objective in the switched variant. `kappa_d` receives the value used.
ProtocolState run_for_objective(int n, const PassParams& params, Scheme scheme, Objective objective,
                                const GeofOptions& geof_options = {}, double* kappa_d = nullptr);

/// Best eta on the bracket with kappa = sqrt(alpha0 eta) and zeta = r.
OptimizationResult optimize_eta(int n, double alpha0, double r, Scheme scheme, Objective objective,
                                const OptimizerOptions& options = {});

struct LossModel {
  double alpha0 = 25.0;
  double r = 0.0;
  /// eta = zeta = 0 with the coupling searched directly on [0, 2].
  bool lossless = false;
};

/// Optimizes the decoupling protocol. For the unswitched decoupler the pass
/// coupling and the decoupling coupling coincide, so the lossless optimum is
/// sqrt(n - 1/2) / n.
OptimizationResult optimize_disentangle_kappa(int n, const LossModel& loss, Scheme scheme,
                                              Objective objective = Objective::MinimizeAtomicP,
                                              const OptimizerOptions& options = {});

}  // namespace isim
