#include "linpred/born.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "linpred/error.hpp"

namespace linpred {

namespace {

constexpr double kUnitaryTol = 1e-12;
constexpr double kHermitianTol = 1e-12;
constexpr double kImagTol = 1e-10;

double scale_of(const CMatrix& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

SpectralOperator::SpectralOperator(Vector eigenvalues, CMatrix eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
  const Index r = eigenvalues_.size();
  if (eigenvectors_.rows() != r || eigenvectors_.cols() != r) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvector matrix must be r x r");
  }
  if (!eigenvalues_.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite eigenvalue");
  if ((eigenvectors_.adjoint() * eigenvectors_ - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff() > kUnitaryTol) {
    throw Error(ErrorCode::InvalidInput, "eigenvectors are not orthonormal");
  }
}

SpectralOperator SpectralOperator::from_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "operator must be square");
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol * scale_of(a)) {
    throw Error(ErrorCode::NonHermitianInput, "operator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
  return SpectralOperator(eig.eigenvalues(), eig.eigenvectors());
}

SpectralOperator SpectralOperator::diagonal(const Vector& eigenvalues) {
  const Index r = eigenvalues.size();
  return SpectralOperator(eigenvalues, CMatrix::Identity(r, r));
}

CMatrix SpectralOperator::matrix() const {
  return eigenvectors_ * eigenvalues_.cast<std::complex<double>>().asDiagonal() * eigenvectors_.adjoint();
}

DensityOperator::DensityOperator(CMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "rho must be square");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw Error(ErrorCode::NonHermitianInput, "density operator is not Hermitian");
  }
  if (std::abs(rho_.trace() - std::complex<double>(1.0, 0.0)) > kHermitianTol) {
    throw Error(ErrorCode::InvalidInput, "density operator must have unit trace");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kHermitianTol) {
    throw Error(ErrorCode::InvalidInput, "density operator is not positive semidefinite");
  }
}

DensityOperator DensityOperator::maximally_mixed(Index r) {
  return DensityOperator(CMatrix::Identity(r, r) / static_cast<double>(r));
}

DensityOperator DensityOperator::pure(const CVector& state) {
  const CVector u = state.normalized();
  return DensityOperator(u * u.adjoint());
}

DensityOperator DensityOperator::mixture(const Vector& probabilities, const CMatrix& basis) {
  if (basis.cols() != probabilities.size()) throw Error(ErrorCode::DimensionMismatch, "one probability per vector");
  if ((probabilities.array() < 0.0).any()) throw Error(ErrorCode::InvalidInput, "negative probability");
  return DensityOperator(basis * probabilities.cast<std::complex<double>>().asDiagonal() * basis.adjoint());
}

ScalarFunction tabulated(std::vector<std::pair<double, double>> table, double tol) {
  return [table = std::move(table), tol](double x) {
    for (const auto& [key, value] : table) {
      if (std::abs(key - x) <= tol * std::max(1.0, std::abs(key))) return value;
    }
    return std::nan("");
  };
}

SpectralOperator apply_function(const SpectralOperator& op, const ScalarFunction& xi) {
  Vector mapped(op.dim());
  for (Index i = 0; i < op.dim(); ++i) {
    mapped(i) = xi(op.eigenvalues()(i));
    if (!std::isfinite(mapped(i))) {
      throw Error(ErrorCode::UndefinedAtEigenvalue, "function undefined at eigenvalue " +
                                                        format_double(op.eigenvalues()(i)));
    }
  }
  return SpectralOperator(std::move(mapped), op.eigenvectors());
}

double born_expectation(const DensityOperator& rho, const SpectralOperator& op, const ScalarFunction& xi) {
  if (rho.dim() != op.dim()) throw Error(ErrorCode::DimensionMismatch, "rho and operator differ in dimension");
  const CMatrix f = apply_function(op, xi).matrix();
  const std::complex<double> value = (rho.matrix() * f).trace();
  if (std::abs(value.imag()) > kImagTol * std::max(1.0, std::abs(value.real()))) {
    throw Error(ErrorCode::NonHermitianInput, "trace(rho xi(A)) has a non-negligible imaginary part");
  }
  return value.real();
}

std::vector<double> prior_grid(const GammaComponentPrior& prior, int grid_size) {
  if (grid_size < 1) throw Error(ErrorCode::InvalidInput, "grid size must be >= 1");
  const auto r = static_cast<std::size_t>(grid_size);
  std::vector<double> points(r);
  if (const auto* pm = std::get_if<PointMassPrior>(&prior)) {
    std::fill(points.begin(), points.end(), pm->value);
  } else if (const auto* nm = std::get_if<NormalPrior>(&prior)) {
    if (nm->sd == 0.0) {
      std::fill(points.begin(), points.end(), nm->mean);
      return points;
    }
    // Bin centroid of N(0,1) over [z_{i-1}, z_i] is r (phi(z_{i-1}) - phi(z_i)).
    const boost::math::normal_distribution<double> unit;
    auto density_at_edge = [&](std::size_t i) {
      if (i == 0 || i == r) return 0.0;
      const double z = boost::math::quantile(unit, static_cast<double>(i) / static_cast<double>(r));
      return boost::math::pdf(unit, z);
    };
    double left = density_at_edge(0);
    for (std::size_t i = 0; i < r; ++i) {
      const double right = density_at_edge(i + 1);
      points[i] = nm->mean + nm->sd * static_cast<double>(r) * (left - right);
      left = right;
    }
  } else {
    const auto& lu = std::get<LogUniformPrior>(prior);
    const double log_ratio = std::log(lu.hi / lu.lo);
    // Density 1/(gamma log_ratio) has bin centroid (b - a) / log(b / a) = r (b - a) / log_ratio.
    double a = lu.lo;
    for (std::size_t i = 0; i < r; ++i) {
      const double b = lu.lo * std::exp(log_ratio * static_cast<double>(i + 1) / static_cast<double>(r));
      points[i] = static_cast<double>(r) * (b - a) / log_ratio;
      a = b;
    }
  }
  return points;
}

double criterion46_via_born(const GammaPrior& prior, std::span<const double> lambdas, int m, int grid_size) {
  validate_prior(prior);
  if (grid_size < 8) throw Error(ErrorCode::InvalidInput, "grid size must be >= 8");
  if (m < 0 || static_cast<std::size_t>(m) > prior.m() || static_cast<std::size_t>(m) > lambdas.size()) {
    throw Error(ErrorCode::DimensionMismatch, "m exceeds the prior or eigenvalue count");
  }
  const DensityOperator rho = DensityOperator::maximally_mixed(grid_size);
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const auto& component = prior.components[static_cast<std::size_t>(j)];
    const std::vector<double> grid = prior_grid(component, grid_size);
    const SpectralOperator op = SpectralOperator::diagonal(Eigen::Map<const Vector>(grid.data(), grid_size));
    const double mu = prior_mean(component);
    total += lambdas[static_cast<std::size_t>(j)] *
             born_expectation(rho, op, [mu](double g) { return (g - mu) * (g - mu); });
  }
  return total;
}

}  // namespace linpred
