#pragma once

#include <filesystem>
#include <vector>

#include "linpred/linalg.hpp"

namespace linpred {

/// n observations of (x, y). Immutable after construction.
class Dataset {
 public:
  Dataset(Matrix x, Vector y);

  /// Reads comma-separated rows: the first p columns are predictors, the last
  /// is the response.
  static Dataset from_csv(const std::filesystem::path& path, bool has_header);

  const Matrix& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  Index n() const noexcept { return x_.rows(); }
  Index p() const noexcept { return x_.cols(); }

 private:
  Matrix x_;
  Vector y_;
};

enum class CovarianceDivisor { NMinusOne, N };

struct SampleMoments {
  Vector x_mean;
  double y_mean = 0.0;
  Matrix sigma_xx;
  Vector sigma_xy;
};

SampleMoments sample_moments(const Dataset& data, CovarianceDivisor divisor = CovarianceDivisor::NMinusOne);

struct PlsOptions {
  CovarianceDivisor divisor = CovarianceDivisor::NMinusOne;
  double rank_tol = 1e-8;
  /// Recompute the coefficient by NIPALS and require agreement within
  /// cross_check_tol * max(1, ||beta||).
  bool cross_check = true;
  double cross_check_tol = 1e-6;
};

/// beta_a = sum_j alpha_j e_j over the empirical Krylov vectors
/// e_1 = s_xy, e_{j+1} = S_xx e_j.
struct PlsFit {
  int a = 0;
  Vector beta;
  Vector alpha;
  Matrix krylov;  // p x a, column j is e_{j+1}
  Vector x_mean;
  double y_mean = 0.0;

  /// alpha_j e_j, the j-th Krylov term of beta (0-based).
  Vector term(int j) const { return alpha(j) * krylov.col(j); }
};

/// Throws RankDeficientKrylov when the empirical Krylov space has dimension < a.
PlsFit fit_pls(const Dataset& data, int a, const PlsOptions& options = {});

/// The same coefficient computed by NIPALS deflation of the centered data.
Vector nipals_coefficients(const Dataset& data, int a);

double predict(const PlsFit& fit, const Vector& x_new);

struct SkewProjection {
  Vector coeffs;    // zeta
  Vector residual;  // f, with e_j' sigma_xx f = 0
};

/// beta_any = krylov * zeta + f under the sigma_xx inner product.
SkewProjection skew_project(const Vector& beta_any, const Matrix& krylov, const Matrix& sigma_xx);

struct CvPoint {
  int a;
  double msep;
  int failed_folds;
};

/// k-fold cross-validated prediction error for a = 1..max_a. Fold of row i is i mod k.
std::vector<CvPoint> cross_validate_components(const Dataset& data, int max_a, int folds = 5,
                                               const PlsOptions& options = {});

}  // namespace linpred
