#include "interface_sim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "simplex.hpp"

namespace isim {

namespace {

constexpr double kInfeasibleOffset = 20.0;

Mat2 inverse_sqrt_spd(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(m);
  return es.operatorInverseSqrt();
}

// Projectors onto the anti-squeezed (e^{2r}) and squeezed (e^{-2r})
// eigenspaces of TMS(r) = [[c 1, s Z], [s Z, c 1]], Z = diag(1, -1).
struct TmsProjectors {
  Mat4 grow;
  Mat4 shrink;
};

const TmsProjectors& tms_projectors() {
  static const TmsProjectors p = [] {
    Vec4 u1(1, 0, 1, 0), u2(0, 1, 0, -1);
    u1 /= std::sqrt(2.0);
    u2 /= std::sqrt(2.0);
    Mat4 grow = u1 * u1.transpose() + u2 * u2.transpose();
    return TmsProjectors{grow, Mat4::Identity() - grow};
  }();
  return p;
}

Mat2 squeeze_rotation(double theta1, double s, double theta2) {
  return rotation(theta1) * Eigen::Vector2d(std::exp(s), std::exp(-s)).asDiagonal() * rotation(theta2);
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol, double& fmax) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc > fd) {
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
  }
  fmax = std::max(fc, fd);
  return fc > fd ? c : d;
}

template <class Predicate>
double bisect(Predicate feasible, double infeasible_end, double feasible_end, double tol) {
  while (std::abs(feasible_end - infeasible_end) > tol) {
    const double mid = 0.5 * (infeasible_end + feasible_end);
    (feasible(mid) ? feasible_end : infeasible_end) = mid;
  }
  return feasible_end;
}

double symmetric_seed_squeezing(const StandardForm& sf) {
  const double a = 0.5 * (sf.a + sf.b);
  const double num = a - sf.c_x;
  const double den = a + sf.c_p;
  if (num <= 0.0 || den <= 0.0) return 0.0;
  return 0.25 * std::log(num / den);
}

struct Search {
  GeofResult result;
  double best = std::numeric_limits<double>::infinity();
};

void run_starts(Search& search, const detail::Objective& objective, const std::vector<std::vector<double>>& starts,
                double step, const GeofOptions& options) {
  for (const auto& start : starts) {
    auto on_iter = [&](double value) {
      if (options.record_trace) search.result.trace.push_back(std::min(search.best, value));
    };
    const detail::SimplexTolerance tol{options.size_tolerance, options.value_tolerance, options.max_iterations};
    const auto run = detail::nelder_mead(objective, start, step, tol, on_iter);
    if (run.converged) ++search.result.converged_starts;
    search.best = std::min(search.best, run.value);
  }
}

}  // namespace

CovarianceMatrix StandardForm::matrix() const {
  Mat4 m = Mat4::Zero();
  m.diagonal() << a, a, b, b;
  m(0, 2) = m(2, 0) = c_x;
  m(1, 3) = m(3, 1) = c_p;
  return CovarianceMatrix(m);
}

double epr_variance(const CovarianceMatrix& gamma) {
  const Mat4& g = gamma.matrix();
  return 0.25 * (g(0, 0) + g(3, 3) - 2.0 * g(0, 3)) + 0.25 * (g(1, 1) + g(2, 2) - 2.0 * g(1, 2));
}

double partial_transpose_min_eigenvalue(const CovarianceMatrix& gamma) {
  const Vec4 flip(1.0, 1.0, 1.0, -1.0);
  const Mat4 pt = flip.asDiagonal() * gamma.matrix() * flip.asDiagonal();
  return symplectic_eigenvalues(CovarianceMatrix(pt)).second;
}

double log_negativity(const CovarianceMatrix& gamma) {
  return std::max(0.0, -std::log2(partial_transpose_min_eigenvalue(gamma)));
}

StandardForm standard_form(const CovarianceMatrix& gamma) {
  const Mat2 a = gamma.block(Mode::Atoms, Mode::Atoms);
  const Mat2 b = gamma.block(Mode::Light, Mode::Light);
  const Mat2 c = gamma.block(Mode::Atoms, Mode::Light);
  const double det_a = a.determinant();
  const double det_b = b.determinant();
  if (det_a < 1.0 - kPhysicalityTolerance || det_b < 1.0 - kPhysicalityTolerance) {
    throw InvalidStateError(fmt::format("standard_form: local determinants ({}, {}) below 1", det_a, det_b));
  }
  const double la = std::sqrt(det_a);
  const double lb = std::sqrt(det_b);
  // (A / la)^{-1/2} has unit determinant, hence is a local symplectic map
  // taking A to la * 1.
  const Mat2 wa = inverse_sqrt_spd(a / la);
  const Mat2 wb = inverse_sqrt_spd(b / lb);
  Eigen::JacobiSVD<Mat2> svd(wa * c * wb.transpose());
  const Eigen::Vector2d sv = svd.singularValues();
  const double sign = c.determinant() < 0.0 ? -1.0 : 1.0;
  return StandardForm{la, lb, sv(0), sign * sv(1)};
}

double pure_state_entropy(double nu) {
  if (nu <= 1.0 + 1e-15) return 0.0;
  const double p = 0.5 * (nu + 1.0);
  const double m = 0.5 * (nu - 1.0);
  return p * std::log2(p) - m * std::log2(m);
}

double entropy_from_epr(double delta) {
  if (delta >= 1.0) return 0.0;
  const double root = std::sqrt(delta);
  const double cp = std::pow(1.0 / root + root, 2) / 4.0;
  const double cm = std::pow(1.0 / root - root, 2) / 4.0;
  return cp * std::log2(cp) - (cm > 0.0 ? cm * std::log2(cm) : 0.0);
}

double geof_symmetric(const StandardForm& sf) {
  const double a = 0.5 * (sf.a + sf.b);
  const double d1 = (a - sf.c_x) * (a + sf.c_p);
  const double d2 = (a + sf.c_x) * (a - sf.c_p);
  return entropy_from_epr(std::sqrt(std::max(0.0, std::min(d1, d2))));
}

double squeezing(const CovarianceMatrix& gamma, Mode mode, Quadrature quad) {
  const int i = quadrature_index(mode, quad);
  return gamma(i, i);
}

GeofResult geof_minimize(const CovarianceMatrix& gamma, const GeofOptions& options) {
  const StandardForm sf = standard_form(gamma);
  Mat2 upper, gp;
  upper << sf.a, sf.c_x, sf.c_x, sf.b;
  gp << sf.a, sf.c_p, sf.c_p, sf.b;
  upper += options.slack * Mat2::Identity();
  gp += options.slack * Mat2::Identity();
  // A pure state without x-p correlations has blocks X (+) X^-1, and
  // X (+) X^-1 <= gamma iff lower <= X <= upper. Its reduced symplectic
  // eigenvalue is 1 / sqrt(1 - rho^2), rho the correlation coefficient of X.
  const Mat2 lower = gp.inverse();
  Eigen::SelfAdjointEigenSolver<Mat2> es(upper - lower);
  const Eigen::Vector2d gap = es.eigenvalues().cwiseMax(0.0);
  const Mat2 root = es.eigenvectors() * gap.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  auto rho2 = [](const Mat2& x) { return x(0, 1) * x(0, 1) / (x(0, 0) * x(1, 1)); };
  auto entropy = [](double r2) { return pure_state_entropy(1.0 / std::sqrt(std::max(1e-300, 1.0 - r2))); };

  Search search;
  // rho^2 has no interior stationary points with rho != 0, so the optimum
  // lies on a face: X = upper - v v^T or X = lower + v v^T with
  // v = root w, |w| <= 1. Coordinates: |w| = sin^2(psi), arg w = theta.
  for (const double side : {-1.0, 1.0}) {
    const Mat2& base = side < 0.0 ? upper : lower;
    const detail::Objective objective = [&](const std::vector<double>& p) {
      ++search.result.evaluations;
      const double s = std::pow(std::sin(p[0]), 2);
      const Eigen::Vector2d v = root * Eigen::Vector2d(s * std::cos(p[1]), s * std::sin(p[1]));
      return entropy(rho2(base + side * v * v.transpose()));
    };
    constexpr double quarter = 0.78539816339744831;
    std::vector<std::vector<double>> starts;
    if (options.symmetric_seed) {
      starts.push_back({2.0 * quarter, quarter});
      starts.push_back({2.0 * quarter, 3.0 * quarter});
    }
    std::mt19937_64 rng(options.seed + (side < 0.0 ? 0 : 1));
    std::uniform_real_distribution<double> angle(0.0, 4.0 * quarter);
    for (int i = 0; i < options.restarts; ++i) starts.push_back({angle(rng), angle(rng)});
    run_starts(search, objective, starts, 0.3, options);
  }
  if (search.result.converged_starts == 0) {
    throw NumericalFailure("geof: no minimizer start converged", search.best);
  }
  search.result.value = std::max(0.0, search.best);
  return search.result;
}

GeofResult geof_minimize_general(const CovarianceMatrix& gamma, const GeofOptions& options) {
  const StandardForm sf = standard_form(gamma);
  const Mat4 g = sf.matrix().matrix() + options.slack * Mat4::Identity();
  const TmsProjectors& tms = tms_projectors();

  Search search;
  // Parameters: (theta1, s, theta2) for each mode; the two-mode squeezing
  // log t = 2r is solved exactly since lambda_min(g' - t P - Q / t) is
  // concave in t.
  const detail::Objective objective = [&](const std::vector<double>& p) {
    ++search.result.evaluations;
    Mat4 linv = Mat4::Zero();
    linv.block<2, 2>(0, 0) = squeeze_rotation(p[0], p[1], p[2]).inverse();
    linv.block<2, 2>(2, 2) = squeeze_rotation(p[3], p[4], p[5]).inverse();
    const Mat4 gl = linv * g * linv.transpose();
    auto margin = [&](double u) {
      const Mat4 m = gl - std::exp(u) * tms.grow - std::exp(-u) * tms.shrink;
      return Eigen::SelfAdjointEigenSolver<Mat4>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
    };
    if (margin(0.0) >= 0.0) return 0.0;
    double gmax = 0.0;
    const double u_star = golden_max(margin, -12.0, 12.0, 1e-11, gmax);
    if (gmax < 0.0) return kInfeasibleOffset - gmax;
    const double u = bisect([&](double x) { return margin(x) >= 0.0; }, 0.0, u_star, 1e-12);
    return pure_state_entropy(std::cosh(u));
  };

  std::vector<std::vector<double>> starts;
  if (options.symmetric_seed) {
    const double s = symmetric_seed_squeezing(sf);
    starts.push_back({0.0, s, 0.0, 0.0, s, 0.0});
  }
  constexpr double pi = 3.14159265358979323846;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.0, pi);
  std::uniform_real_distribution<double> squeeze(-1.0, 1.0);
  for (int i = 0; i < options.restarts; ++i) {
    starts.push_back({angle(rng), squeeze(rng), angle(rng), angle(rng), squeeze(rng), angle(rng)});
  }

  run_starts(search, objective, starts, 0.3, options);
  if (search.best >= kInfeasibleOffset || search.result.converged_starts == 0) {
    throw NumericalFailure("geof: minimizer found no converged feasible decomposition", search.best);
  }
  search.result.value = std::max(0.0, search.best);
  return search.result;
}

}  // namespace isim
