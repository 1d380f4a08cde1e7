#include "linpred/estimators.hpp"

#include <charconv>
#include <cmath>

#include "linpred/error.hpp"

namespace linpred {

EstimatorSpec EstimatorSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto bad = [&](const char* why) {
    return Error(ErrorCode::InvalidInput, "estimator '" + std::string(text) + "': " + why);
  };

  if (head == "ols") {
    if (colon != std::string_view::npos) throw bad("ols takes no parameter");
    return ols();
  }
  if (colon == std::string_view::npos || arg.empty()) throw bad("missing parameter");
  if (head == "ridge") {
    double k = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(k) || k < 0.0) {
      throw bad("ridge penalty must be a nonnegative number");
    }
    return ridge(k);
  }
  if (head == "pcr" || head == "pls") {
    int c = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), c);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || c < 1) throw bad("component count must be >= 1");
    return head == "pcr" ? pcr(c) : pls(c);
  }
  throw bad("unknown estimator kind");
}

std::string EstimatorSpec::to_string() const {
  switch (kind) {
    case Kind::Ols: return "ols";
    case Kind::Ridge: return "ridge:" + format_double(ridge_k);
    case Kind::Pcr: return "pcr:" + std::to_string(components);
    case Kind::Pls: return "pls:" + std::to_string(components);
  }
  return "?";
}

namespace {

Vector solve_spd_or_throw(const Matrix& a, const Vector& b, const char* what) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& ev = eig.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  if (!(ev.minCoeff() > 1e-12 * hi)) throw Error(ErrorCode::SingularDesign, what);
  const Matrix& v = eig.eigenvectors();
  return v * (v.transpose() * b).cwiseQuotient(ev);
}

}  // namespace

LinearFit fit(const EstimatorSpec& spec, const Dataset& data, const PlsOptions& pls_options) {
  const Index p = data.p();
  if (spec.kind == EstimatorSpec::Kind::Pls) {
    PlsFit pls = fit_pls(data, spec.components, pls_options);
    LinearFit out{pls.beta, pls.x_mean, pls.y_mean, std::move(pls)};
    return out;
  }

  const SampleMoments mo = sample_moments(data, pls_options.divisor);
  LinearFit out;
  out.x_mean = mo.x_mean;
  out.y_mean = mo.y_mean;
  switch (spec.kind) {
    case EstimatorSpec::Kind::Ols:
      out.beta = solve_spd_or_throw(mo.sigma_xx, mo.sigma_xy, "sample covariance is singular");
      break;
    case EstimatorSpec::Kind::Ridge: {
      if (spec.ridge_k < 0.0) throw Error(ErrorCode::InvalidInput, "ridge penalty must be >= 0");
      const Matrix penalized = mo.sigma_xx + spec.ridge_k * Matrix::Identity(p, p);
      out.beta = solve_spd_or_throw(penalized, mo.sigma_xy, "penalized covariance is singular");
      break;
    }
    case EstimatorSpec::Kind::Pcr: {
      if (spec.components < 1 || spec.components > p) {
        throw Error(ErrorCode::InvalidInput, "pcr component count must lie in [1, p]");
      }
      Eigen::SelfAdjointEigenSolver<Matrix> eig(mo.sigma_xx);
      out.beta = Vector::Zero(p);
      for (int j = 0; j < spec.components; ++j) {
        const Index col = p - 1 - j;  // eigenvalues ascend
        const double lambda = eig.eigenvalues()(col);
        if (!(lambda > 1e-12 * eig.eigenvalues()(p - 1))) {
          throw Error(ErrorCode::SingularDesign, "principal component with zero variance");
        }
        const auto v = eig.eigenvectors().col(col);
        out.beta += (v.dot(mo.sigma_xy) / lambda) * v;
      }
      break;
    }
    case EstimatorSpec::Kind::Pls:
      break;
  }
  return out;
}

std::vector<EstimatorSpec> default_ridge_grid(double scale) {
  std::vector<EstimatorSpec> out;
  for (double f : {0.001, 0.01, 0.1, 1.0, 10.0}) out.push_back(EstimatorSpec::ridge(f * scale));
  return out;
}

}  // namespace linpred
