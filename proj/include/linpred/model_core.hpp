#pragma once

#include <vector>

#include "linpred/linalg.hpp"

namespace linpred {

/// Numerical thresholds standing in for the exact-zero conditions of the
/// reduced-rank model.
struct ModelOptions {
  /// Krylov rank cutoff, relative to the spectral norm of the covariance.
  double rank_tol = 1e-8;
  /// |gamma| below zero_tol * ||beta|| counts as an absent component.
  double zero_tol = 1e-10;
  /// Eigenvalues closer than this (relative to the largest) share an eigenspace.
  double multiplicity_tol = 1e-9;
};

/// Second-moment parameters of a centered (x, y) pair: cov(x), cov(x, y) and
/// the residual variance var(y | x). The regression vector is derived once at
/// construction.
class FullParameter {
 public:
  FullParameter(Matrix sigma_xx, Vector sigma_xy, double sigma2);

  /// Builds the parameter from var(y) instead of the residual variance.
  static FullParameter from_var_y(Matrix sigma_xx, Vector sigma_xy, double var_y);

  const Matrix& sigma_xx() const noexcept { return sigma_xx_; }
  const Vector& sigma_xy() const noexcept { return sigma_xy_; }
  double sigma2() const noexcept { return sigma2_; }
  Index p() const noexcept { return sigma_xy_.size(); }

  /// sigma_xx^{-1} sigma_xy.
  const Vector& beta() const noexcept { return beta_; }
  double var_y() const noexcept { return sigma2_ + sigma_xy_.dot(beta_); }

 private:
  Matrix sigma_xx_;
  Vector sigma_xy_;
  double sigma2_;
  Vector beta_;
};

struct SpectralDecomposition {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, orthonormal
  std::vector<std::vector<Index>> multiplicity_groups;
};

/// Eigen-decomposition of a symmetric positive-definite matrix with a
/// deterministic sign convention (largest-magnitude entry of each eigenvector
/// is positive).
SpectralDecomposition spectral_decomposition(const Matrix& sigma,
                                             double multiplicity_tol = ModelOptions{}.multiplicity_tol);

/// Eigenbasis of sigma_xx rotated inside every multiplicity group so that at
/// most one vector of the group carries a projection of beta. That vector is
/// the normalized projection; the rest of the group is completed orthogonally.
SpectralDecomposition adapted_eigenbasis(const FullParameter& phi, const ModelOptions& options = {});

struct ReducedComponent {
  double gamma;
  Vector direction;
  double eigenvalue;
};

/// The m nonzero (gamma_j, d_j) pairs of beta's eigen-expansion.
class ReducedParameter {
 public:
  explicit ReducedParameter(Index p) : p_(p) {}
  ReducedParameter(Index p, std::vector<ReducedComponent> components, double zero_tol = ModelOptions{}.zero_tol);

  Index p() const noexcept { return p_; }
  Index m() const noexcept { return static_cast<Index>(components_.size()); }
  const std::vector<ReducedComponent>& components() const noexcept { return components_; }

 private:
  Index p_;
  std::vector<ReducedComponent> components_;
};

/// A rival reduction, given by its coordinates on an eigenbasis of sigma_xx.
struct AlternativeReduction {
  Vector zeta;
};

struct KrylovBasis {
  Matrix vectors;  // column k holds sigma_xx^k sigma_xy
  Index a() const noexcept { return vectors.cols(); }
};

Vector beta_true(const FullParameter& phi);

/// Dimension of the Krylov space of (sigma_xx, sigma_xy): the number of
/// eigenspaces of sigma_xx on which sigma_xy has a projection larger than
/// rank_tol * ||sigma_xy||.
int relevant_component_count(const FullParameter& phi, const ModelOptions& options = {});

/// Throws DimensionMismatch unless m is the relevant component count.
/// Components are ordered by descending |gamma_j| * lambda_j, ties by
/// eigenvalue rank.
ReducedParameter reduce_to_theta(const FullParameter& phi, int m, const ModelOptions& options = {});

Vector beta_of_theta(const ReducedParameter& theta);

Vector beta_of_eta(const AlternativeReduction& eta, const SpectralDecomposition& basis);

KrylovBasis krylov_basis(const FullParameter& phi, int a);

}  // namespace linpred
