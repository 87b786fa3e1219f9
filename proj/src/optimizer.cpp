#include "interface_sim/optimizer.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

namespace isim {

namespace {

constexpr double kDisentangleKappaMax = 3.0;
constexpr double kLosslessKappaMax = 2.0;

double signed_objective(double metric, Objective objective) {
  return objective == Objective::MaximizeGEOF ? -metric : metric;
}

}  // namespace

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::MaximizeGEOF: return "geof";
    case Objective::MinimizeEPR: return "epr";
    case Objective::MinimizeAtomicP: return "atomic-p";
    case Objective::MinimizeLightP: return "light-p";
  }
  return "?";
}

std::optional<Objective> parse_objective(std::string_view text) {
  for (Objective o : {Objective::MaximizeGEOF, Objective::MinimizeEPR, Objective::MinimizeAtomicP,
                      Objective::MinimizeLightP}) {
    if (text == to_string(o)) return o;
  }
  return std::nullopt;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) {
    throw ParameterError(fmt::format("golden_section_minimize: empty bracket [{}, {}]", lo, hi));
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMinimum out;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  out.evaluations = 2;
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
    ++out.evaluations;
  }
  // Ties go to the smaller abscissa.
  if (fc <= fd) {
    out.x = c;
    out.value = fc;
  } else {
    out.x = d;
    out.value = fd;
  }
  return out;
}

BracketMinimum robust_minimize(const std::function<double(double)>& f, const BracketSearch& search) {
  std::map<double, double> cache;
  auto cached = [&](double x) {
    auto [it, inserted] = cache.try_emplace(x, 0.0);
    if (inserted) it->second = f(x);
    return it->second;
  };
  auto consider = [](BracketMinimum& best, double x, double value) {
    if (value < best.value || (value == best.value && x < best.x)) {
      best.x = x;
      best.value = value;
    }
  };

  BracketMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  const ScalarMinimum golden = golden_section_minimize(cached, search.lo, search.hi, search.tolerance);
  consider(best, golden.x, golden.value);

  std::vector<double> grid(static_cast<std::size_t>(search.grid_points));
  for (int i = 0; i < search.grid_points; ++i) {
    const double u = search.grid_points > 1 ? static_cast<double>(i) / (search.grid_points - 1) : 0.0;
    grid[i] = search.log_grid ? search.lo * std::pow(search.hi / search.lo, u) : search.lo + u * (search.hi - search.lo);
  }
  std::size_t grid_best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (cached(grid[i]) < cached(grid[grid_best])) grid_best = i;
  }
  const double grid_value = cached(grid[grid_best]);
  if (grid_value < golden.value - 1e-6) {
    const double lo = grid[grid_best == 0 ? 0 : grid_best - 1];
    const double hi = grid[std::min(grid_best + 1, grid.size() - 1)];
    if (lo < hi) {
      const ScalarMinimum local = golden_section_minimize(cached, lo, hi, search.tolerance);
      consider(best, local.x, local.value);
    }
  }
  consider(best, grid[grid_best], grid_value);

  best.evaluations = static_cast<int>(cache.size());
  const double edge = 10.0 * search.tolerance;
  best.at_edge = best.x <= search.lo + edge || best.x >= search.hi - edge;
  return best;
}

double crude_delta(double alpha0, double eta) { return 1.0 / (1.0 + alpha0 * eta) + 2.0 * eta; }

double crude_delta_large_density(double alpha0, double eta) { return 1.0 / (alpha0 * eta) + 2.0 * eta; }

CrudeModel crude_single_pass(double alpha0) {
  if (!(alpha0 > 0.0)) {
    throw ParameterError(fmt::format("crude_single_pass: alpha0 = {} must be positive", alpha0));
  }
  CrudeModel m;
  m.eta0 = 1.0 / std::sqrt(2.0 * alpha0);
  m.delta_min = 2.0 * std::sqrt(2.0 / alpha0);
  // (1 + alpha0 eta)^2 = alpha0 / 2; below alpha0 = 2 the minimum sits at eta = 0.
  m.eta_stationary = std::max(0.0, (std::sqrt(alpha0 / 2.0) - 1.0) / alpha0);
  m.delta_stationary = crude_delta(alpha0, m.eta_stationary);
  return m;
}

Metrics evaluate_metrics(const ProtocolState& state, Scheme scheme, const GeofOptions& geof_options) {
  Metrics m;
  m.geof = geof(state.gamma, geof_options);
  m.epr = epr_variance(state.gamma);
  m.atomic_p = objective_metric(state, scheme, Objective::MinimizeAtomicP);
  m.light_p = squeezing(state.gamma, Mode::Light, Quadrature::P);
  return m;
}

double objective_metric(const ProtocolState& state, Scheme scheme, Objective objective,
                        const GeofOptions& geof_options) {
  switch (objective) {
    case Objective::MaximizeGEOF: return geof(state.gamma, geof_options);
    case Objective::MinimizeEPR: return epr_variance(state.gamma);
    case Objective::MinimizeAtomicP:
      if (has_disentangle_pass(scheme)) return squeezing(state.gamma, Mode::Atoms, Quadrature::P);
      return optimal_homodyne_variance(state.gamma, Mode::Light);
    case Objective::MinimizeLightP: return squeezing(state.gamma, Mode::Light, Quadrature::P);
  }
  return 0.0;
}

ProtocolState run_for_objective(int n, const PassParams& params, Scheme scheme, Objective objective,
                                const GeofOptions& geof_options, double* kappa_d) {
  ProtocolOptions opts;
  if (scheme == Scheme::UnswitchedThenDisentangle) {
    opts.disentangle_kappa = params.kappa;
  } else if (scheme == Scheme::SwitchedThenDisentangle) {
    auto f = [&](double kd) {
      ProtocolOptions o;
      o.disentangle_kappa = kd;
      return signed_objective(objective_metric(run_protocol(n, params, scheme, o), scheme, objective, geof_options),
                              objective);
    };
    opts.disentangle_kappa = golden_section_minimize(f, 0.0, kDisentangleKappaMax, 1e-9).x;
  }
  if (kappa_d && opts.disentangle_kappa) *kappa_d = *opts.disentangle_kappa;
  return run_protocol(n, params, scheme, opts);
}

namespace {

// Returns the result and the optimal search variable.
std::pair<OptimizationResult, double> optimize_over(const std::function<PassParams(double)>& make_params, int n,
                                                    Scheme scheme, Objective objective, const BracketSearch& search,
                                                    const GeofOptions& geof_options) {
  auto f = [&](double x) {
    const ProtocolState state = run_for_objective(n, make_params(x), scheme, objective, geof_options);
    return signed_objective(objective_metric(state, scheme, objective, geof_options), objective);
  };
  const BracketMinimum best = robust_minimize(f, search);

  OptimizationResult result;
  const PassParams params = make_params(best.x);
  double kd = 0.0;
  run_for_objective(n, params, scheme, objective, geof_options, &kd);
  result.kappa_star = params.kappa;
  if (has_disentangle_pass(scheme)) result.kappa_d_star = kd;
  result.value = signed_objective(best.value, objective);
  result.evaluations = best.evaluations;
  result.at_bracket_edge = best.at_edge;
  return {result, best.x};
}

}  // namespace

OptimizationResult optimize_eta(int n, double alpha0, double r, Scheme scheme, Objective objective,
                                const OptimizerOptions& options) {
  if (n < 1) throw ParameterError(fmt::format("optimize_eta: n = {} must be >= 1", n));
  if (!(alpha0 > 0.0)) throw ParameterError(fmt::format("optimize_eta: alpha0 = {} must be positive", alpha0));
  if (!(r >= 0.0 && r < 1.0)) throw ParameterError(fmt::format("optimize_eta: r = {} must lie in [0, 1)", r));

  auto make = [&](double eta) { return PassParams::from_optical_density(alpha0, eta, 0.0, r); };
  auto [result, eta] = optimize_over(make, n, scheme, objective, options.eta_search, options.geof);
  result.eta_star = eta;
  return result;
}

OptimizationResult optimize_disentangle_kappa(int n, const LossModel& loss, Scheme scheme, Objective objective,
                                              const OptimizerOptions& options) {
  if (!has_disentangle_pass(scheme)) {
    throw ParameterError(fmt::format("optimize_disentangle_kappa: scheme {} has no decoupling pass", to_string(scheme)));
  }
  if (!loss.lossless) return optimize_eta(n, loss.alpha0, loss.r, scheme, objective, options);
  if (n < 1) throw ParameterError(fmt::format("optimize_disentangle_kappa: n = {} must be >= 1", n));

  BracketSearch search;
  search.lo = 0.0;
  search.hi = kLosslessKappaMax;
  search.tolerance = 1e-10;
  search.log_grid = false;
  search.grid_points = options.eta_search.grid_points;
  auto make = [](double kappa) { return PassParams::from_coupling(kappa, 0.0, 0.0, 0.0); };
  return optimize_over(make, n, scheme, objective, search, options.geof).first;
}

}  // namespace isim
