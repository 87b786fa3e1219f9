#pragma once

// Two-mode Gaussian states in the (x_at, p_at, x_ph, p_ph) ordering.
//
// Covariances use the vacuum-equals-identity convention, so a quadrature
// variance relative to the coherent state is the diagonal entry itself.

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace isim {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

enum class Mode { Atoms, Light };
enum class Quadrature { X, P };

/// Invalid physical or numerical parameter (probabilities out of range, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input covariance does not describe a state the operation accepts.
class InvalidStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative routine failed. `best_bound()` carries the best value found,
/// when one exists.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what, double best_bound = 0.0)
      : std::runtime_error(what), best_bound_(best_bound) {}
  double best_bound() const noexcept { return best_bound_; }

 private:
  double best_bound_;
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kPhysicalityTolerance = 1e-9;

/// Symmetric 4x4 covariance matrix. Every constructor symmetrizes.
class CovarianceMatrix {
 public:
  CovarianceMatrix() : m_(Mat4::Identity()) {}
  explicit CovarianceMatrix(const Mat4& m) : m_(0.5 * (m + m.transpose())) {}

  static CovarianceMatrix vacuum() { return CovarianceMatrix(); }
  static CovarianceMatrix diagonal(const Vec4& d) { return CovarianceMatrix(Mat4(d.asDiagonal())); }

  const Mat4& matrix() const noexcept { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// 2x2 block between the quadrature pairs of two modes.
  Mat2 block(Mode row, Mode col) const;

 private:
  Mat4 m_;
};

/// Index of a quadrature in the 4-vector R = (x_at, p_at, x_ph, p_ph).
constexpr int quadrature_index(Mode mode, Quadrature quad) {
  return (mode == Mode::Atoms ? 0 : 2) + (quad == Quadrature::X ? 0 : 1);
}

/// Omega = [[0,1],[-1,0]] (+) [[0,1],[-1,0]].
const Mat4& symplectic_form();

/// M gamma M^T, re-symmetrized.
CovarianceMatrix apply_linear_map(const CovarianceMatrix& gamma, const Mat4& m);

/// Symplectic eigenvalues (nu_1 >= nu_2) from the Hermitian matrix
/// gamma^{1/2} (i Omega) gamma^{1/2}, whose spectrum is {+-nu_1, +-nu_2}.
/// Throws InvalidStateError unless gamma is positive definite.
std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& gamma);

bool is_physical(const CovarianceMatrix& gamma, double tol = kPhysicalityTolerance);

/// R(phi) = [[cos, sin], [-sin, cos]] acting on one quadrature pair.
Mat2 rotation(double phi);
Mat4 local_rotation(double phi_atoms, double phi_light);

/// Congruence with R(phi_atoms) (+) R(phi_light).
CovarianceMatrix rotate_quadratures(const CovarianceMatrix& gamma, double phi_atoms, double phi_light);

/// Covariance of the unmeasured mode after homodyne detection of
/// `quad` on `measured`. Outcome independent:
///   A - C (pi B pi)^+ C^T
/// Throws InvalidStateError if the measured variance is not positive.
Mat2 condition_on_quadrature(const CovarianceMatrix& gamma, Mode measured, Quadrature quad);

/// Homodyne detection of cos(phi) x + sin(phi) p on `measured`.
Mat2 condition_on_rotated_quadrature(const CovarianceMatrix& gamma, Mode measured, double phi);

/// Smallest quadrature variance of the kept mode after homodyne detection of
/// `measured` at the best angle: lambda_min(A - C B^-1 C^T).
double optimal_homodyne_variance(const CovarianceMatrix& gamma, Mode measured);

}  // namespace isim
