#include "linpred/population_pls.hpp"

#include <cmath>
#include <string>

#include "linpred/error.hpp"
#include "linpred/model_core.hpp"

namespace linpred {

PopulationPlsResult run_population_pls(const FullParameter& phi, int max_steps, const PopulationPlsOptions& options) {
  const Index p = phi.p();
  if (max_steps < 1 || max_steps > p) {
    throw Error(ErrorCode::DimensionMismatch, "max_steps must lie in [1, p]");
  }
  // The recursions run on eigen-coordinates of sigma_xx. Products with the
  // diagonal covariance do not mix coordinates, so rounding noise outside the
  // relevant eigenspaces is not re-injected at every step.
  const SpectralDecomposition eig = spectral_decomposition(phi.sigma_xx());
  const Matrix& d = eig.eigenvectors;
  const Vector& lambda = eig.eigenvalues;
  // Eigenspaces carrying less than relevance_tol of sigma_xy are absent under
  // the reduced model; their rounding-level coordinates would otherwise be
  // amplified by the Krylov polynomial and delay the stop.
  Vector s_xy = d.transpose() * phi.sigma_xy();
  const double cutoff = options.relevance_tol * s_xy.norm();
  for (const auto& group : eig.multiplicity_groups) {
    double sq = 0.0;
    for (Index k : group) sq += s_xy(k) * s_xy(k);
    if (!(std::sqrt(sq) > cutoff)) {
      for (Index k : group) s_xy(k) = 0.0;
    }
  }
  const double sigma_norm = lambda(0);

  PopulationPlsResult result;
  PopulationPlsState& st = result.state;
  Matrix s_res = lambda.asDiagonal();
  Vector w_next = s_xy;
  double f_var = phi.var_y();
  st.first_weight_norm = s_xy.norm();
  Matrix weights(p, 0);

  for (int j = 1; j <= max_steps; ++j) {
    const Vector w = w_next;
    const Vector sw = s_res * w;
    const double t_var = w.dot(sw);
    if (!(t_var > options.score_tol * sigma_norm * w.squaredNorm())) {
      throw Error(ErrorCode::DegenerateScore, "var(t_" + std::to_string(j) + ") vanished before the stop rule");
    }
    const Vector loading = sw / t_var;
    const double q = w.dot(w_next) / t_var;

    s_res -= t_var * loading * loading.transpose();
    s_res = 0.5 * (s_res + s_res.transpose()).eval();
    f_var -= q * q * t_var;
    st.steps.push_back({d * w, d * loading, q, t_var, f_var});

    // The deflated cov(e_j, f_j) equals sigma_xy - sigma_xx beta_j, where
    // beta_j projects beta onto the weights seen so far. Evaluating that form
    // keeps the stop rule free of the drift of repeated deflation.
    weights.conservativeResize(p, j);
    weights.col(j - 1) = w.normalized();
    const Eigen::HouseholderQR<Matrix> qr(weights);
    const Matrix basis = qr.householderQ() * Matrix::Identity(p, j);
    const Matrix gram = basis.transpose() * lambda.asDiagonal() * basis;
    const Vector beta_j = basis * gram.ldlt().solve(basis.transpose() * s_xy);
    w_next = s_xy - lambda.cwiseProduct(beta_j);
    st.next_weight_norm = w_next.norm();
    result.stop_step = j;
    if (st.next_weight_norm <= options.stop_tol * st.first_weight_norm) break;
  }
  st.residual_x_cov = d * s_res * d.transpose();
  st.residual_xy_cov = d * w_next;

  // t = R' x with R = W (P'W)^{-1}; the predictor is q' t.
  const Index a = static_cast<Index>(st.steps.size());
  Matrix w(p, a), load(p, a);
  Vector q(a);
  for (Index j = 0; j < a; ++j) {
    w.col(j) = st.steps[static_cast<std::size_t>(j)].weight;
    load.col(j) = st.steps[static_cast<std::size_t>(j)].loading;
    q(j) = st.steps[static_cast<std::size_t>(j)].y_loading;
  }
  const Matrix pw = load.transpose() * w;
  result.beta = w * pw.partialPivLu().solve(q);
  return result;
}

Vector krylov_projection(const FullParameter& phi, int dim) {
  if (dim < 1) return Vector::Zero(phi.p());
  const Matrix basis = arnoldi_basis(phi.sigma_xx(), phi.sigma_xy(), dim);
  if (basis.cols() == 0) return Vector::Zero(phi.p());
  const Matrix gram = basis.transpose() * phi.sigma_xx() * basis;
  const Vector rhs = basis.transpose() * phi.sigma_xy();
  return basis * gram.ldlt().solve(rhs);
}

bool verify_krylov_equivalence(const FullParameter& phi, double tol, const ModelOptions& options) {
  const int m = relevant_component_count(phi, options);
  if (m == 0) return phi.beta().norm() == 0.0;
  const PopulationPlsResult pls = run_population_pls(phi, static_cast<int>(phi.p()));
  const Vector projected = krylov_projection(phi, m);
  return (pls.beta - projected).norm() <= tol * std::max(1.0, phi.beta().norm());
}

}  // namespace linpred
