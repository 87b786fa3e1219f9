#include "interface_sim/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fmt/format.h>

namespace isim {

namespace {

int offset(Mode mode) { return mode == Mode::Atoms ? 0 : 2; }

}  // namespace

Mat2 CovarianceMatrix::block(Mode row, Mode col) const {
  return m_.block<2, 2>(offset(row), offset(col));
}

const Mat4& symplectic_form() {
  static const Mat4 omega = [] {
    Mat4 o = Mat4::Zero();
    o(0, 1) = 1.0;
    o(1, 0) = -1.0;
    o(2, 3) = 1.0;
    o(3, 2) = -1.0;
    return o;
  }();
  return omega;
}

CovarianceMatrix apply_linear_map(const CovarianceMatrix& gamma, const Mat4& m) {
  return CovarianceMatrix(m * gamma.matrix() * m.transpose());
}

std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& gamma) {
  Eigen::SelfAdjointEigenSolver<Mat4> spd(gamma.matrix());
  if (spd.info() != Eigen::Success) {
    throw NumericalFailure("symplectic_eigenvalues: eigensolver did not converge");
  }
  if (spd.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidStateError(
        fmt::format("symplectic_eigenvalues: covariance is not positive definite (min eigenvalue {})",
                    spd.eigenvalues().minCoeff()));
  }
  const Mat4 root = spd.operatorSqrt();

  using Cmat4 = Eigen::Matrix4cd;
  const Cmat4 h = std::complex<double>(0.0, 1.0) * (root * symplectic_form() * root).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Cmat4> herm(h, Eigen::EigenvaluesOnly);
  if (herm.info() != Eigen::Success) {
    throw NumericalFailure("symplectic_eigenvalues: eigensolver did not converge");
  }
  // Ascending: -nu_1, -nu_2, nu_2, nu_1.
  const auto& ev = herm.eigenvalues();
  const double nu1 = 0.5 * (ev(3) - ev(0));
  const double nu2 = 0.5 * (ev(2) - ev(1));
  return {std::max(nu1, nu2), std::max(0.0, std::min(nu1, nu2))};
}

bool is_physical(const CovarianceMatrix& gamma, double tol) {
  try {
    return symplectic_eigenvalues(gamma).second >= 1.0 - tol;
  } catch (const InvalidStateError&) {
    return false;
  }
}

Mat2 rotation(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat2 r;
  r << c, s, -s, c;
  return r;
}

Mat4 local_rotation(double phi_atoms, double phi_light) {
  Mat4 r = Mat4::Zero();
  r.block<2, 2>(0, 0) = rotation(phi_atoms);
  r.block<2, 2>(2, 2) = rotation(phi_light);
  return r;
}

CovarianceMatrix rotate_quadratures(const CovarianceMatrix& gamma, double phi_atoms, double phi_light) {
  return apply_linear_map(gamma, local_rotation(phi_atoms, phi_light));
}

Mat2 condition_on_quadrature(const CovarianceMatrix& gamma, Mode measured, Quadrature quad) {
  const Mode kept = measured == Mode::Atoms ? Mode::Light : Mode::Atoms;
  const Mat2 a = gamma.block(kept, kept);
  const Mat2 b = gamma.block(measured, measured);
  const Mat2 c = gamma.block(kept, measured);

  // pi B pi has a single nonzero entry; its pseudoinverse inverts just that.
  const int q = quad == Quadrature::X ? 0 : 1;
  const double variance = b(q, q);
  if (!(variance > 1e-12)) {
    throw InvalidStateError(fmt::format("condition_on_quadrature: measured variance {} is not positive", variance));
  }
  const Eigen::Vector2d column = c.col(q);
  const Mat2 out = a - column * column.transpose() / variance;
  return 0.5 * (out + out.transpose());
}

Mat2 condition_on_rotated_quadrature(const CovarianceMatrix& gamma, Mode measured, double phi) {
  // Rotating the measured mode by phi brings the homodyned quadrature to x.
  const Mat4 r = measured == Mode::Atoms ? local_rotation(phi, 0.0) : local_rotation(0.0, phi);
  return condition_on_quadrature(apply_linear_map(gamma, r), measured, Quadrature::X);
}

double optimal_homodyne_variance(const CovarianceMatrix& gamma, Mode measured) {
  const Mode kept = measured == Mode::Atoms ? Mode::Light : Mode::Atoms;
  const Mat2 b = gamma.block(measured, measured);
  if (!(b.determinant() > 0.0)) {
    throw InvalidStateError("optimal_homodyne_variance: measured block is singular");
  }
  const Mat2 c = gamma.block(kept, measured);
  const Mat2 schur = gamma.block(kept, kept) - c * b.inverse() * c.transpose();
  return Eigen::SelfAdjointEigenSolver<Mat2>(0.5 * (schur + schur.transpose())).eigenvalues()(0);
}

}  // namespace isim
