#include "linpred/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "linpred/error.hpp"

namespace linpred {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kDefinitenessTol = 1e-12;

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidInput, std::string(what) + " has non-finite entries");
}

}  // namespace

FullParameter::FullParameter(Matrix sigma_xx, Vector sigma_xy, double sigma2)
    : sigma_xx_(std::move(sigma_xx)), sigma_xy_(std::move(sigma_xy)), sigma2_(sigma2) {
  const Index p = sigma_xy_.size();
  if (p == 0 || sigma_xx_.rows() != p || sigma_xx_.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "sigma_xx must be p x p with p = len(sigma_xy) > 0");
  }
  require_finite(sigma_xx_, "sigma_xx");
  require_finite(sigma_xy_, "sigma_xy");
  if (!std::isfinite(sigma2_) || sigma2_ < 0.0) {
    throw Error(ErrorCode::InvalidInput, "sigma2 must be finite and nonnegative");
  }
  const double scale = std::max(sigma_xx_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((sigma_xx_ - sigma_xx_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw Error(ErrorCode::InvalidInput, "sigma_xx is not symmetric");
  }
  sigma_xx_ = 0.5 * (sigma_xx_ + sigma_xx_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma_xx_, Eigen::EigenvaluesOnly);
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(hi > 0.0) || lo <= kDefinitenessTol * hi) {
    throw Error(ErrorCode::NonPositiveDefinite, "sigma_xx has an eigenvalue <= tolerance");
  }
  Eigen::LDLT<Matrix> ldlt(sigma_xx_);
  beta_ = ldlt.solve(sigma_xy_);
}

FullParameter FullParameter::from_var_y(Matrix sigma_xx, Vector sigma_xy, double var_y) {
  FullParameter probe(sigma_xx, sigma_xy, 0.0);
  const double explained = probe.sigma_xy().dot(probe.beta());
  double sigma2 = var_y - explained;
  // Round-off can leave a tiny negative residual when var_y is exactly explained.
  if (sigma2 < 0.0 && sigma2 > -1e-12 * std::max(1.0, std::abs(var_y))) sigma2 = 0.0;
  if (sigma2 < 0.0) throw Error(ErrorCode::InvalidInput, "var(y) is smaller than the explained variance");
  return FullParameter(std::move(sigma_xx), std::move(sigma_xy), sigma2);
}

SpectralDecomposition spectral_decomposition(const Matrix& sigma, double multiplicity_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidInput, "eigen-decomposition failed");
  const Index p = sigma.rows();
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  canonicalize_column_signs(out.eigenvectors);

  const double top = p > 0 ? std::abs(out.eigenvalues(0)) : 0.0;
  for (Index j = 0; j < p; ++j) {
    if (j > 0 && out.eigenvalues(j - 1) - out.eigenvalues(j) <= multiplicity_tol * top) {
      out.multiplicity_groups.back().push_back(j);
    } else {
      out.multiplicity_groups.push_back({j});
    }
  }
  return out;
}

SpectralDecomposition adapted_eigenbasis(const FullParameter& phi, const ModelOptions& options) {
  SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx(), options.multiplicity_tol);
  const Vector& beta = phi.beta();
  const double cutoff = options.zero_tol * beta.norm();
  for (const auto& group : basis.multiplicity_groups) {
    const Index g = static_cast<Index>(group.size());
    if (g < 2) continue;
    Matrix block(phi.p(), g);
    for (Index k = 0; k < g; ++k) block.col(k) = basis.eigenvectors.col(group[k]);
    const Vector coords = block.transpose() * beta;
    const double norm = coords.norm();
    if (!(norm > cutoff)) continue;
    Matrix rotation = complete_orthonormal_basis(coords / norm);
    Matrix rotated = block * rotation;
    // Only the completion columns need the sign convention; the leading one is
    // fixed by the direction of beta.
    Matrix tail = rotated.rightCols(g - 1);
    canonicalize_column_signs(tail);
    rotated.rightCols(g - 1) = tail;
    for (Index k = 0; k < g; ++k) basis.eigenvectors.col(group[k]) = rotated.col(k);
  }
  return basis;
}

ReducedParameter::ReducedParameter(Index p, std::vector<ReducedComponent> components, double zero_tol)
    : p_(p), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.direction.size() != p_) throw Error(ErrorCode::DimensionMismatch, "component direction has wrong length");
    if (!(std::abs(c.gamma) > zero_tol)) throw Error(ErrorCode::InvalidInput, "reduced component with zero gamma");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    for (std::size_t j = i; j < components_.size(); ++j) {
      const double dot = components_[i].direction.dot(components_[j].direction);
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(dot - want) > 1e-8) {
        throw Error(ErrorCode::InvalidInput, "reduced component directions are not orthonormal");
      }
    }
  }
}

Vector beta_true(const FullParameter& phi) { return phi.beta(); }

namespace {

// First index of every multiplicity group on which sigma_xy has a projection
// above rank_tol * ||sigma_xy||. In exact arithmetic these groups are the
// dimensions of the Krylov space; counting them on the eigenbasis avoids the
// error amplification of building that space explicitly.
std::vector<Index> relevant_indices(const FullParameter& phi, const SpectralDecomposition& basis,
                                    const ModelOptions& options) {
  std::vector<Index> out;
  const double cutoff = options.rank_tol * phi.sigma_xy().norm();
  for (const auto& group : basis.multiplicity_groups) {
    double sq = 0.0;
    for (Index j : group) {
      const double c = basis.eigenvectors.col(j).dot(phi.sigma_xy());
      sq += c * c;
    }
    if (std::sqrt(sq) > cutoff && sq > 0.0) out.push_back(group.front());
  }
  return out;
}

}  // namespace

int relevant_component_count(const FullParameter& phi, const ModelOptions& options) {
  const SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx(), options.multiplicity_tol);
  return static_cast<int>(relevant_indices(phi, basis, options).size());
}

ReducedParameter reduce_to_theta(const FullParameter& phi, int m, const ModelOptions& options) {
  const int relevant = relevant_component_count(phi, options);
  if (m != relevant) {
    throw Error(ErrorCode::DimensionMismatch,
                "m = " + std::to_string(m) + " but the relevant component count is " + std::to_string(relevant));
  }
  const SpectralDecomposition basis = adapted_eigenbasis(phi, options);
  const Vector coords = basis.eigenvectors.transpose() * phi.beta();
  std::vector<Index> keep = relevant_indices(phi, basis, options);
  std::stable_sort(keep.begin(), keep.end(), [&](Index a, Index b) {
    return std::abs(coords(a)) * basis.eigenvalues(a) > std::abs(coords(b)) * basis.eigenvalues(b);
  });
  std::vector<ReducedComponent> components;
  components.reserve(keep.size());
  for (Index j : keep) {
    components.push_back({coords(j), basis.eigenvectors.col(j), basis.eigenvalues(j)});
  }
  return ReducedParameter(phi.p(), std::move(components), 0.0);
}

Vector beta_of_theta(const ReducedParameter& theta) {
  Vector beta = Vector::Zero(theta.p());
  for (const auto& c : theta.components()) beta += c.gamma * c.direction;
  return beta;
}

Vector beta_of_eta(const AlternativeReduction& eta, const SpectralDecomposition& basis) {
  if (eta.zeta.size() != basis.eigenvectors.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "zeta length differs from the eigenbasis size");
  }
  return basis.eigenvectors * eta.zeta;
}

KrylovBasis krylov_basis(const FullParameter& phi, int a) {
  if (a < 1) throw Error(ErrorCode::InvalidInput, "Krylov length must be >= 1");
  KrylovBasis out;
  out.vectors.resize(phi.p(), a);
  out.vectors.col(0) = phi.sigma_xy();
  for (int k = 1; k < a; ++k) out.vectors.col(k) = phi.sigma_xx() * out.vectors.col(k - 1);
  return out;
}

}  // namespace linpred
