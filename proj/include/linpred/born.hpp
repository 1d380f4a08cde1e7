#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "linpred/linalg.hpp"
#include "linpred/optimality.hpp"

namespace linpred {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using ScalarFunction = std::function<double(double)>;

/// A Hermitian operator sum_i theta_i u_i u_i^dagger kept in spectral form.
class SpectralOperator {
 public:
  SpectralOperator(Vector eigenvalues, CMatrix eigenvectors);

  /// Diagonalizes a Hermitian matrix.
  static SpectralOperator from_hermitian(const CMatrix& a);
  static SpectralOperator diagonal(const Vector& eigenvalues);

  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }
  Index dim() const noexcept { return eigenvalues_.size(); }
  CMatrix matrix() const;

 private:
  Vector eigenvalues_;
  CMatrix eigenvectors_;
};

/// Positive semidefinite, unit-trace Hermitian matrix.
class DensityOperator {
 public:
  explicit DensityOperator(CMatrix rho);

  /// r^{-1} I.
  static DensityOperator maximally_mixed(Index r);
  static DensityOperator pure(const CVector& state);
  /// sum_i p_i u_i u_i^dagger over the columns of `basis`.
  static DensityOperator mixture(const Vector& probabilities, const CMatrix& basis);

  const CMatrix& matrix() const noexcept { return rho_; }
  Index dim() const noexcept { return rho_.rows(); }

 private:
  CMatrix rho_;
};

/// A function known only at listed points (matched within `tol`); other
/// arguments evaluate to NaN.
ScalarFunction tabulated(std::vector<std::pair<double, double>> table, double tol = 1e-12);

/// Same eigenvectors, eigenvalues mapped through xi. Throws
/// UndefinedAtEigenvalue when xi is not finite at an eigenvalue.
SpectralOperator apply_function(const SpectralOperator& op, const ScalarFunction& xi);

/// Re trace(rho xi(A)).
double born_expectation(const DensityOperator& rho, const SpectralOperator& op, const ScalarFunction& xi);

/// `grid_size` support points carrying equal prior mass: the conditional
/// means of the prior over its grid_size equal-probability bins.
std::vector<double> prior_grid(const GammaComponentPrior& prior, int grid_size);

/// sum_{j<=m} lambda_j E[(gamma_j - mu_j)^2] evaluated through the Born rule with
/// the maximally mixed state on discretized gamma operators.
double criterion46_via_born(const GammaPrior& prior, std::span<const double> lambdas, int m, int grid_size);

}  // namespace linpred
