#include "linpred/sample_pls.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "linpred/error.hpp"

namespace linpred {

Dataset::Dataset(Matrix x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.size()) throw Error(ErrorCode::DimensionMismatch, "X and y differ in row count");
  if (x_.rows() < 2) throw Error(ErrorCode::InvalidInput, "a dataset needs n >= 2");
  if (x_.cols() < 1) throw Error(ErrorCode::InvalidInput, "a dataset needs at least one predictor");
  if (!x_.allFinite() || !y_.allFinite()) throw Error(ErrorCode::InvalidInput, "dataset has non-finite entries");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::InvalidInput,
                "line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  return value;
}

}  // namespace

Dataset Dataset::from_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && has_header) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw Error(ErrorCode::InvalidInput, "line " + std::to_string(line_no) + ": inconsistent column count");
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_double(f, line_no));
    rows.push_back(std::move(row));
  }
  if (width < 2) throw Error(ErrorCode::InvalidInput, "CSV needs at least one predictor and a response column");
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(width) - 1;
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (Index j = 0; j < p; ++j) x(i, j) = row[static_cast<std::size_t>(j)];
    y(i) = row.back();
  }
  return Dataset(std::move(x), std::move(y));
}

SampleMoments sample_moments(const Dataset& data, CovarianceDivisor divisor) {
  SampleMoments mo;
  mo.x_mean = data.x().colwise().mean().transpose();
  mo.y_mean = data.y().mean();
  const Matrix xc = data.x().rowwise() - mo.x_mean.transpose();
  const Vector yc = data.y().array() - mo.y_mean;
  const double denom = static_cast<double>(divisor == CovarianceDivisor::N ? data.n() : data.n() - 1);
  mo.sigma_xx = (xc.transpose() * xc) / denom;
  mo.sigma_xy = (xc.transpose() * yc) / denom;
  return mo;
}

PlsFit fit_pls(const Dataset& data, int a, const PlsOptions& options) {
  const Index p = data.p();
  if (a < 1 || a > p) throw Error(ErrorCode::InvalidInput, "component count must lie in [1, p]");
  const SampleMoments mo = sample_moments(data, options.divisor);

  const int rank = krylov_dimension(mo.sigma_xx, mo.sigma_xy, a, options.rank_tol);
  if (rank < a) {
    throw Error(ErrorCode::RankDeficientKrylov, "empirical Krylov space has dimension " + std::to_string(rank) +
                                                    " < a = " + std::to_string(a));
  }

  // Unit-length Krylov directions with their scales; e_j = scale_j * u_j.
  Matrix u(p, a);
  Vector scale(a);
  u.col(0) = mo.sigma_xy.normalized();
  scale(0) = mo.sigma_xy.norm();
  for (int j = 1; j < a; ++j) {
    const Vector next = mo.sigma_xx * u.col(j - 1);
    const double nrm = next.norm();
    u.col(j) = next / nrm;
    scale(j) = scale(j - 1) * nrm;
  }
  // Normalized Krylov directions drift toward the top eigenvector, so the
  // projection is solved on a pivoted-QR orthonormal basis of their span and
  // the Krylov coefficients are read off afterwards.
  const Eigen::ColPivHouseholderQR<Matrix> qr(u);
  const Matrix q = qr.householderQ() * Matrix::Identity(p, a);
  const Matrix gram = q.transpose() * mo.sigma_xx * q;
  const Vector beta = q * gram.ldlt().solve(q.transpose() * mo.sigma_xy);
  const Vector c = qr.solve(beta);

  PlsFit fit;
  fit.a = a;
  fit.alpha = c.cwiseQuotient(scale);
  fit.krylov = u * scale.asDiagonal();
  fit.beta = beta;
  fit.x_mean = mo.x_mean;
  fit.y_mean = mo.y_mean;

  if (options.cross_check) {
    const Vector nipals = nipals_coefficients(data, a);
    if ((nipals - fit.beta).norm() > options.cross_check_tol * std::max(1.0, fit.beta.norm())) {
      throw Error(ErrorCode::RankDeficientKrylov, "Krylov and NIPALS coefficients disagree; basis is degenerate");
    }
  }
  return fit;
}

Vector nipals_coefficients(const Dataset& data, int a) {
  const Index p = data.p();
  Matrix e = data.x().rowwise() - data.x().colwise().mean();
  Vector f = data.y().array() - data.y().mean();
  Matrix w(p, a), load(p, a);
  Vector q(a);
  for (int j = 0; j < a; ++j) {
    Vector wj = e.transpose() * f;
    const double wn = wj.norm();
    if (!(wn > 0.0)) throw Error(ErrorCode::RankDeficientKrylov, "NIPALS weight vanished");
    wj /= wn;
    const Vector t = e * wj;
    const double tt = t.squaredNorm();
    if (!(tt > 0.0)) throw Error(ErrorCode::RankDeficientKrylov, "NIPALS score vanished");
    const Vector pj = e.transpose() * t / tt;
    const double qj = f.dot(t) / tt;
    e -= t * pj.transpose();
    f -= qj * t;
    w.col(j) = wj;
    load.col(j) = pj;
    q(j) = qj;
  }
  const Matrix pw = load.transpose() * w;
  return w * pw.partialPivLu().solve(q);
}

double predict(const PlsFit& fit, const Vector& x_new) {
  if (x_new.size() != fit.beta.size()) throw Error(ErrorCode::DimensionMismatch, "x_new has wrong length");
  return fit.y_mean + fit.beta.dot(x_new - fit.x_mean);
}

SkewProjection skew_project(const Vector& beta_any, const Matrix& krylov, const Matrix& sigma_xx) {
  const Index p = beta_any.size();
  if (krylov.rows() != p || sigma_xx.rows() != p || sigma_xx.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "skew projection operands differ in dimension");
  }
  const Index a = krylov.cols();
  Vector col_norm = krylov.colwise().norm().transpose();
  for (Index j = 0; j < a; ++j) {
    if (!(col_norm(j) > 0.0)) throw Error(ErrorCode::SingularGram, "zero Krylov column");
  }
  const Matrix d = krylov * col_norm.cwiseInverse().asDiagonal();
  const Matrix gram = d.transpose() * sigma_xx * d;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) throw Error(ErrorCode::SingularGram, "D' sigma_xx D is numerically singular");

  const Vector c = gram.ldlt().solve(d.transpose() * (sigma_xx * beta_any));
  SkewProjection out;
  out.coeffs = c.cwiseQuotient(col_norm);
  out.residual = beta_any - d * c;
  return out;
}

std::vector<CvPoint> cross_validate_components(const Dataset& data, int max_a, int folds, const PlsOptions& options) {
  const Index n = data.n();
  if (folds < 2 || folds > n) throw Error(ErrorCode::InvalidInput, "fold count must lie in [2, n]");
  if (max_a < 1 || max_a > data.p()) throw Error(ErrorCode::InvalidInput, "max_a must lie in [1, p]");
  std::vector<CvPoint> out;
  for (int a = 1; a <= max_a; ++a) {
    double sse = 0.0;
    Index scored = 0;
    int failed = 0;
    for (int k = 0; k < folds; ++k) {
      std::vector<Index> train, test;
      for (Index i = 0; i < n; ++i) (i % folds == k ? test : train).push_back(i);
      if (train.size() < 2) {
        ++failed;
        continue;
      }
      Matrix xt(static_cast<Index>(train.size()), data.p());
      Vector yt(static_cast<Index>(train.size()));
      for (std::size_t r = 0; r < train.size(); ++r) {
        xt.row(static_cast<Index>(r)) = data.x().row(train[r]);
        yt(static_cast<Index>(r)) = data.y()(train[r]);
      }
      try {
        const PlsFit fit = fit_pls(Dataset(std::move(xt), std::move(yt)), a, options);
        for (Index i : test) {
          const double r = data.y()(i) - predict(fit, data.x().row(i).transpose());
          sse += r * r;
          ++scored;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficientKrylov) throw;
        ++failed;
      }
    }
    out.push_back({a, scored > 0 ? sse / static_cast<double>(scored) : std::nan(""), failed});
  }
  return out;
}

}  // namespace linpred
