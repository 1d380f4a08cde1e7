#pragma once

#include <vector>

#include "linpred/model_core.hpp"

namespace linpred {

struct PopulationPlsOptions {
  /// Stop once ||w_{j+1}|| <= stop_tol * ||w_1||.
  double stop_tol = 1e-9;
  /// var(t_j) <= score_tol * ||sigma_xx|| * ||w_j||^2 is treated as a zero score.
  double score_tol = 1e-14;
  /// Eigenspaces of sigma_xx holding less than this fraction of ||sigma_xy||
  /// are treated as absent (the rank rule of relevant_component_count).
  double relevance_tol = ModelOptions{}.rank_tol;
};

struct PopulationPlsStep {
  Vector weight;                 // w_j = cov(e_{j-1}, f_{j-1})
  Vector loading;                // p_j
  double y_loading;              // q_j
  double score_variance;         // var(t_j)
  double residual_y_variance;    // var(f_j)
};

/// Population PLS carried out on covariance functionals: the residuals e_j and
/// f_j are represented by cov(e_j), cov(e_j, f_j) and var(f_j).
struct PopulationPlsState {
  std::vector<PopulationPlsStep> steps;
  Matrix residual_x_cov;
  Vector residual_xy_cov;   // the next weight w_{j+1}
  double first_weight_norm = 0.0;
  double next_weight_norm = 0.0;
};

struct PopulationPlsResult {
  PopulationPlsState state;
  Vector beta;  // coefficient of the population PLS predictor
  int stop_step = 0;
};

/// Runs at most `max_steps` (<= p) deflation steps. Throws DegenerateScore when
/// a score has zero variance before the stopping rule fires.
PopulationPlsResult run_population_pls(const FullParameter& phi, int max_steps,
                                       const PopulationPlsOptions& options = {});

/// Projection of beta onto the first `dim` Krylov vectors in the sigma_xx inner
/// product.
Vector krylov_projection(const FullParameter& phi, int dim);

/// Population PLS coefficient equals the sigma_xx-projection of beta on the
/// first m Krylov vectors (m = relevant component count), within `tol`
/// relative to max(1, ||beta||).
bool verify_krylov_equivalence(const FullParameter& phi, double tol = 1e-7, const ModelOptions& options = {});

}  // namespace linpred
