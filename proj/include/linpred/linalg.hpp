#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

namespace linpred {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// b' A b for symmetric A.
inline double quad_form(const Matrix& a, const Vector& b) { return b.dot(a * b); }

/// Largest absolute eigenvalue of a symmetric matrix.
double spectral_norm_symmetric(const Matrix& a);

/// Returns an n x n orthogonal matrix whose leading columns are `u`.
/// The columns of `u` must already be orthonormal.
Matrix complete_orthonormal_basis(const Matrix& u);

/// Flips the sign of each column so its entry of largest magnitude is
/// positive (first such entry on ties).
void canonicalize_column_signs(Matrix& columns);

/// Dimension of the Krylov space span{b, A b, A^2 b, ...} truncated at
/// `max_dim`. The space is grown by Arnoldi with full reorthogonalization and
/// stops when the new direction's residual falls to `rel_tol * ||A||_2`.
int krylov_dimension(const Matrix& a, const Vector& b, int max_dim, double rel_tol);

/// Orthonormal Arnoldi basis of the Krylov space, `dim` columns.
Matrix arnoldi_basis(const Matrix& a, const Vector& b, int dim);

/// Summation by recursive halving; result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

/// Sample standard deviation (divisor n - 1) divided by sqrt(n).
double standard_error(std::span<const double> values);

}  // namespace linpred
