#include "linpred/linalg.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <vector>

#include "linpred/error.hpp"

namespace linpred {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidGroupElement: return "InvalidGroupElement";
    case ErrorCode::DegenerateScore: return "DegenerateScore";
    case ErrorCode::RankDeficientKrylov: return "RankDeficientKrylov";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::UnsupportedPrior: return "UnsupportedPrior";
    case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::UndefinedAtEigenvalue: return "UndefinedAtEigenvalue";
    case ErrorCode::NonHermitianInput: return "NonHermitianInput";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ExperimentPolicy: return "ExperimentPolicy";
  }
  return "Unknown";
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double spectral_norm_symmetric(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix complete_orthonormal_basis(const Matrix& u) {
  const Index n = u.rows();
  const Index k = u.cols();
  Matrix out(n, n);
  if (k == 0) {
    out.setIdentity();
    return out;
  }
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  out.leftCols(k) = u;
  out.rightCols(n - k) = q.rightCols(n - k);
  return out;
}

void canonicalize_column_signs(Matrix& columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < columns.rows(); ++i) {
      const double v = std::abs(columns(i, j));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (columns.rows() > 0 && columns(best, j) < 0.0) columns.col(j) *= -1.0;
  }
}

namespace {

// Grows an orthonormal Krylov basis; returns the number of columns filled.
int grow_arnoldi(const Matrix& a, const Vector& b, int max_dim, double stop_level, Matrix& basis) {
  const Index n = b.size();
  basis.resize(n, std::max(max_dim, 0));
  const double bnorm = b.norm();
  if (max_dim <= 0 || bnorm == 0.0 || !std::isfinite(bnorm)) return 0;
  basis.col(0) = b / bnorm;
  int dim = 1;
  while (dim < max_dim) {
    Vector w = a * basis.col(dim - 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < dim; ++k) w -= basis.col(k).dot(w) * basis.col(k);
    }
    const double h = w.norm();
    if (!(h > stop_level)) break;
    basis.col(dim) = w / h;
    ++dim;
  }
  return dim;
}

}  // namespace

int krylov_dimension(const Matrix& a, const Vector& b, int max_dim, double rel_tol) {
  Matrix basis;
  return grow_arnoldi(a, b, max_dim, rel_tol * spectral_norm_symmetric(a), basis);
}

Matrix arnoldi_basis(const Matrix& a, const Vector& b, int dim) {
  Matrix basis;
  const int got = grow_arnoldi(a, b, dim, 0.0, basis);
  return basis.leftCols(got);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::nan("");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return std::nan("");
  const double mu = mean(values);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (values[i] - mu) * (values[i] - mu);
  const double var = pairwise_sum(sq) / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace linpred
