#pragma once

// Random symplectic maps and physical two-mode states for property tests.

#include <cmath>
#include <random>

#include "interface_sim/gaussian.hpp"

namespace isim::testing {

inline Mat2 squeezer(double s) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(s);
  m(1, 1) = std::exp(-s);
  return m;
}

inline Mat4 local(const Mat2& a, const Mat2& b) {
  Mat4 m = Mat4::Zero();
  m.block<2, 2>(0, 0) = a;
  m.block<2, 2>(2, 2) = b;
  return m;
}

inline Mat4 two_mode_squeezer(double r) {
  Mat4 m = Mat4::Zero();
  const double c = std::cosh(r), s = std::sinh(r);
  m.diagonal().setConstant(c);
  m(0, 2) = m(2, 0) = s;
  m(1, 3) = m(3, 1) = -s;
  return m;
}

inline Mat4 beam_splitter(double theta) {
  Mat4 m = Mat4::Zero();
  const double c = std::cos(theta), s = std::sin(theta);
  m.diagonal().setConstant(c);
  m(0, 2) = m(1, 3) = s;
  m(2, 0) = m(3, 1) = -s;
  return m;
}

class StateSampler {
 public:
  explicit StateSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Mat2 local_symplectic(double max_squeeze = 0.8) {
    return rotation(uniform(0, M_PI)) * squeezer(uniform(-max_squeeze, max_squeeze)) * rotation(uniform(0, M_PI));
  }

  Mat4 symplectic() {
    return local(local_symplectic(), local_symplectic()) * beam_splitter(uniform(0, M_PI)) *
           two_mode_squeezer(uniform(-1.0, 1.0)) * local(local_symplectic(), local_symplectic());
  }

  /// S diag(nu1, nu1, nu2, nu2) S^T with nu >= 1 + min_excess.
  CovarianceMatrix physical_state(double max_excess = 2.0, double min_excess = 0.0) {
    const double nu1 = 1.0 + uniform(min_excess, max_excess);
    const double nu2 = 1.0 + uniform(min_excess, max_excess);
    const Mat4 s = symplectic();
    return CovarianceMatrix(s * Vec4(nu1, nu1, nu2, nu2).asDiagonal() * s.transpose());
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Symplectic eigenvalues from the local invariants.
inline std::pair<double, double> invariant_symplectic_eigenvalues(const CovarianceMatrix& g) {
  const double delta = g.block(Mode::Atoms, Mode::Atoms).determinant() + g.block(Mode::Light, Mode::Light).determinant() +
                       2.0 * g.block(Mode::Atoms, Mode::Light).determinant();
  const double det = g.matrix().determinant();
  const double root = std::sqrt(std::max(0.0, delta * delta - 4.0 * det));
  const double nu1 = std::sqrt((delta + root) / 2.0);
  // nu1 nu2 = sqrt(det) avoids the cancellation in (delta - root).
  return {nu1, std::sqrt(std::max(0.0, det)) / nu1};
}

}  // namespace isim::testing
