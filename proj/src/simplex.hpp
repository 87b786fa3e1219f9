#pragma once

// Nelder-Mead downhill simplex for the small (2-6 dimensional) searches of
// the GEOF minimizers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace isim::detail {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

struct SimplexTolerance {
  double size = 1e-9;   // max vertex distance from the best vertex
  double value = 1e-12; // max spread of vertex values
  int max_iterations = 4000;
};

/// Standard coefficients: reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2. `on_iteration` receives the best value after each iteration.
inline SimplexResult nelder_mead(const Objective& f, const std::vector<double>& start, double step,
                                 const SimplexTolerance& tol, const std::function<void(double)>& on_iteration = {}) {
  using Point = std::vector<double>;
  const std::size_t dim = start.size();

  std::vector<Point> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step;
  std::vector<double> vals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

  auto along = [&](const Point& from, const Point& to, double t) {
    Point out(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = from[k] + t * (to[k] - from[k]);
    return out;
  };

  std::vector<std::size_t> order(dim + 1);
  SimplexResult result;
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];

    double size = 0.0;
    for (const auto& p : pts) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (p[k] - pts[best][k]) * (p[k] - pts[best][k]);
      size = std::max(size, std::sqrt(d2));
    }
    if (size < tol.size || vals[worst] - vals[best] <= tol.value) {
      result.converged = true;
      break;
    }
    if (result.iterations >= tol.max_iterations) break;
    ++result.iterations;

    Point centroid(dim, 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k] / static_cast<double>(dim);
    }

    const Point reflected = along(centroid, pts[worst], -1.0);
    const double fr = f(reflected);
    if (fr < vals[best]) {
      const Point expanded = along(centroid, pts[worst], -2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        vals[worst] = fe;
      } else {
        pts[worst] = reflected;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = reflected;
      vals[worst] = fr;
    } else {
      const bool outside = fr < vals[worst];
      const Point contracted = along(centroid, outside ? reflected : pts[worst], 0.5);
      const double fc = f(contracted);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == best) continue;
          pts[i] = along(pts[best], pts[i], 0.5);
          vals[i] = f(pts[i]);
        }
      }
    }
    if (on_iteration) on_iteration(*std::min_element(vals.begin(), vals.end()));
  }

  const auto it = std::min_element(vals.begin(), vals.end());
  result.value = *it;
  result.x = pts[static_cast<std::size_t>(it - vals.begin())];
  return result;
}

}  // namespace isim::detail
