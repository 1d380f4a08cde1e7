#include "linpred/optimality.hpp"

#include <cmath>
#include <string>

#include "linpred/error.hpp"

namespace linpred {

std::string_view to_string(EstimationMode mode) noexcept {
  switch (mode) {
    case EstimationMode::Exact: return "exact";
    case EstimationMode::Analytic: return "analytic";
    case EstimationMode::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

namespace {

CriterionReport make_report(const char* name, double lhs, double rhs, double margin, bool satisfied,
                            EstimationMode mode) {
  CriterionReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = margin;
  r.satisfied = satisfied;
  r.mode = mode;
  return r;
}

void require_same_length(const FullParameter& phi, const Vector& a, const Vector& b) {
  if (a.size() != phi.p() || b.size() != phi.p()) {
    throw Error(ErrorCode::DimensionMismatch, "coefficient vectors must have length p");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void validate_prior(const GammaPrior& prior) {
  if (!prior.independent) throw Error(ErrorCode::UnsupportedPrior, "only independent gamma priors are supported");
  for (const auto& c : prior.components) {
    if (const auto* n = std::get_if<NormalPrior>(&c)) {
      if (!std::isfinite(n->mean) || !std::isfinite(n->sd) || n->sd < 0.0) {
        throw Error(ErrorCode::UnsupportedPrior, "normal prior needs a finite mean and sd >= 0");
      }
    } else if (const auto* pm = std::get_if<PointMassPrior>(&c)) {
      if (!std::isfinite(pm->value)) throw Error(ErrorCode::UnsupportedPrior, "point mass must be finite");
    } else {
      const auto& lu = std::get<LogUniformPrior>(c);
      if (!(lu.lo > 0.0) || !(lu.hi > lu.lo) || !std::isfinite(lu.hi)) {
        throw Error(ErrorCode::UnsupportedPrior, "log-uniform prior needs 0 < lo < hi < inf");
      }
    }
  }
}

double prior_mean(const GammaComponentPrior& c) {
  if (const auto* n = std::get_if<NormalPrior>(&c)) return n->mean;
  if (const auto* pm = std::get_if<PointMassPrior>(&c)) return pm->value;
  const auto& lu = std::get<LogUniformPrior>(c);
  return (lu.hi - lu.lo) / std::log(lu.hi / lu.lo);
}

double prior_variance(const GammaComponentPrior& c) {
  if (const auto* n = std::get_if<NormalPrior>(&c)) return n->sd * n->sd;
  if (std::holds_alternative<PointMassPrior>(c)) return 0.0;
  const auto& lu = std::get<LogUniformPrior>(c);
  const double log_ratio = std::log(lu.hi / lu.lo);
  const double second = (lu.hi * lu.hi - lu.lo * lu.lo) / (2.0 * log_ratio);
  const double first = (lu.hi - lu.lo) / log_ratio;
  return second - first * first;
}

double draw(const GammaComponentPrior& c, Philox4x32& engine) {
  if (const auto* n = std::get_if<NormalPrior>(&c)) return n->mean + n->sd * standard_normal(engine);
  if (const auto* pm = std::get_if<PointMassPrior>(&c)) return pm->value;
  const auto& lu = std::get<LogUniformPrior>(c);
  return lu.lo * std::exp(uniform01(engine) * std::log(lu.hi / lu.lo));
}

// ---------------------------------------------------------------------------

double tau(const Vector& beta_candidate, const FullParameter& phi) {
  if (beta_candidate.size() != phi.p()) throw Error(ErrorCode::DimensionMismatch, "candidate has wrong length");
  const Vector diff = phi.beta() - beta_candidate;
  return phi.sigma2() + quad_form(phi.sigma_xx(), diff);
}

double big_F(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta) {
  require_same_length(phi, beta_theta, beta_eta);
  const Vector sum = beta_eta + beta_theta - 2.0 * phi.beta();
  const Vector diff = beta_eta - beta_theta;
  return sum.dot(phi.sigma_xx() * diff);
}

double big_F(const FullParameter& phi, const ReducedParameter& theta, const AlternativeReduction& eta) {
  const SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx());
  return big_F(phi, beta_of_theta(theta), beta_of_eta(eta, basis));
}

CriterionReport assumption_A(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta) {
  const double cov = big_F(phi, beta_theta, beta_eta);
  return make_report(criterion::kAssumptionA, cov, 0.0, cov, cov > 0.0, EstimationMode::Exact);
}

CriterionReport assumption_A(const FullParameter& phi, const ReducedParameter& theta, const AlternativeReduction& eta) {
  const SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx());
  return assumption_A(phi, beta_of_theta(theta), beta_of_eta(eta, basis));
}

CriterionReport corollary2_check(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta) {
  require_same_length(phi, beta_theta, beta_eta);
  const double lhs = 0.25 * quad_form(phi.sigma_xx(), beta_eta - beta_theta);
  const double rhs = quad_form(phi.sigma_xx(), phi.beta() - beta_theta);
  return make_report(criterion::kCorollary2, lhs, rhs, lhs - rhs, rhs < lhs, EstimationMode::Exact);
}

CriterionReport corollary2_check(const FullParameter& phi, const ReducedParameter& theta,
                                 const AlternativeReduction& eta) {
  const SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx());
  return corollary2_check(phi, beta_of_theta(theta), beta_of_eta(eta, basis));
}

// ---------------------------------------------------------------------------

namespace {

double irrelevant_energy(std::span<const double> lambdas, std::span<const double> gammas, std::size_t m) {
  double s = 0.0;
  for (std::size_t j = 0; j < gammas.size(); ++j) s += gammas[j] * gammas[j] * lambdas[m + j];
  return s;
}

void check_split(const GammaPrior& prior, std::span<const double> lambdas, std::span<const double> irrelevant) {
  validate_prior(prior);
  if (prior.m() + irrelevant.size() != lambdas.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prior size + irrelevant count must equal p");
  }
  for (double l : lambdas) {
    if (!(l > 0.0)) throw Error(ErrorCode::InvalidInput, "eigenvalues must be positive");
  }
}

}  // namespace

CriterionReport thm4_criterion(const GammaPrior& prior, std::span<const double> lambdas,
                               std::span<const double> irrelevant_gammas, std::span<const double> zeta,
                               const Thm4Options& options) {
  check_split(prior, lambdas, irrelevant_gammas);
  if (zeta.size() != lambdas.size()) throw Error(ErrorCode::DimensionMismatch, "zeta must have length p");
  const std::size_t m = prior.m();
  const std::size_t p = lambdas.size();

  const double lhs = 4.0 * irrelevant_energy(lambdas, irrelevant_gammas, m);
  double tail = 0.0;
  for (std::size_t j = m; j < p; ++j) tail += zeta[j] * zeta[j] * lambdas[j];

  bool needs_sampling = false;
  for (const auto& c : prior.components) needs_sampling = needs_sampling || std::holds_alternative<LogUniformPrior>(c);
  const EstimationMode mode =
      options.mode.value_or(needs_sampling ? EstimationMode::MonteCarlo : EstimationMode::Analytic);

  double rhs = 0.0;
  std::optional<double> se;
  int draws_used = 0;
  if (mode == EstimationMode::MonteCarlo) {
    if (options.draws < 2) throw Error(ErrorCode::InvalidInput, "Monte Carlo needs >= 2 draws");
    Philox4x32 engine(options.seed, 0);
    std::vector<double> samples(static_cast<std::size_t>(options.draws));
    for (auto& s : samples) {
      double acc = tail;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = zeta[j] - draw(prior.components[j], engine);
        acc += d * d * lambdas[j];
      }
      s = acc;
    }
    rhs = mean(samples);
    se = standard_error(samples);
    draws_used = options.draws;
  } else {
    if (needs_sampling) throw Error(ErrorCode::UnsupportedPrior, "log-uniform priors are evaluated by Monte Carlo");
    rhs = tail;
    for (std::size_t j = 0; j < m; ++j) {
      const double mu = prior_mean(prior.components[j]);
      rhs += lambdas[j] * ((zeta[j] - mu) * (zeta[j] - mu) + prior_variance(prior.components[j]));
    }
  }
  CriterionReport r = make_report(criterion::kThm4, lhs, rhs, rhs - lhs, lhs < rhs, mode);
  r.std_error = se;
  r.n_replicates = draws_used;
  return r;
}

CriterionReport thm5_criterion(const GammaPrior& prior, std::span<const double> lambdas,
                               std::span<const double> irrelevant_gammas) {
  check_split(prior, lambdas, irrelevant_gammas);
  const std::size_t m = prior.m();
  double lhs = 0.0;
  for (std::size_t j = 0; j < m; ++j) lhs += lambdas[j] * prior_variance(prior.components[j]);
  const double rhs = 4.0 * irrelevant_energy(lambdas, irrelevant_gammas, m);
  return make_report(criterion::kThm5, lhs, rhs, lhs - rhs, lhs > rhs, EstimationMode::Analytic);
}

std::vector<Thm5ProfilePoint> thm5_profile(std::span<const double> lambdas, std::span<const double> variances,
                                           std::span<const double> gammas) {
  const std::size_t p = lambdas.size();
  if (variances.size() != p || gammas.size() != p) {
    throw Error(ErrorCode::DimensionMismatch, "profile inputs must all have length p");
  }
  std::vector<Thm5ProfilePoint> out;
  for (std::size_t m = 1; m < p; ++m) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < m; ++j) lhs += lambdas[j] * variances[j];
    double rhs = 0.0;
    for (std::size_t j = m; j < p; ++j) rhs += gammas[j] * gammas[j] * lambdas[j];
    out.push_back({static_cast<int>(m), lhs, 4.0 * rhs});
  }
  return out;
}

// ---------------------------------------------------------------------------

CriterionReport thm6_criterion(std::span<const Vector> rival, std::span<const Vector> pls, const FullParameter& phi,
                               int min_replicates) {
  if (rival.size() != pls.size()) throw Error(ErrorCode::DimensionMismatch, "replicate sets differ in size");
  if (static_cast<int>(pls.size()) < min_replicates) {
    throw Error(ErrorCode::InsufficientReplicates, "need >= " + std::to_string(min_replicates) + " replicates");
  }
  const std::size_t r = pls.size();
  std::vector<double> left(r), right(r), diff(r);
  for (std::size_t i = 0; i < r; ++i) {
    left[i] = quad_form(phi.sigma_xx(), rival[i] - pls[i]);
    right[i] = 4.0 * quad_form(phi.sigma_xx(), phi.beta() - pls[i]);
    diff[i] = left[i] - right[i];
  }
  const double lhs = mean(left);
  const double rhs = mean(right);
  CriterionReport out = make_report(criterion::kThm6, lhs, rhs, lhs - rhs, lhs > rhs, EstimationMode::MonteCarlo);
  out.std_error = standard_error(diff);
  out.n_replicates = static_cast<int>(r);
  return out;
}

Matrix krylov_terms(const PlsFit& fit) { return fit.krylov * fit.alpha.asDiagonal(); }

CriterionReport thm7_criterion(std::span<const Matrix> terms, const FullParameter& phi, int min_replicates) {
  if (static_cast<int>(terms.size()) < min_replicates || terms.size() < 2) {
    throw Error(ErrorCode::InsufficientReplicates, "need >= " + std::to_string(min_replicates) + " replicates");
  }
  const std::size_t r = terms.size();
  const Index p = phi.p();
  const Index a = terms.front().cols();
  for (const auto& t : terms) {
    if (t.rows() != p || t.cols() != a) throw Error(ErrorCode::DimensionMismatch, "Krylov term shapes differ");
  }
  Matrix mu = Matrix::Zero(p, a);
  for (const auto& t : terms) mu += t;
  mu /= static_cast<double>(r);

  // W uses the unbiased (r - 1) divisor; per-replicate contributions are scaled to match.
  const double scale = static_cast<double>(r) / static_cast<double>(r - 1);
  std::vector<double> left(r), right(r), diff(r);
  for (std::size_t i = 0; i < r; ++i) {
    const Matrix dev = terms[i] - mu;
    double acc = 0.0;
    for (Index j = 0; j < a; ++j) acc += quad_form(phi.sigma_xx(), dev.col(j));
    left[i] = scale * acc;
    const Vector beta_hat = terms[i].rowwise().sum();
    right[i] = 4.0 * quad_form(phi.sigma_xx(), phi.beta() - beta_hat);
    diff[i] = left[i] - right[i];
  }
  const double lhs = mean(left);
  const double rhs = mean(right);
  CriterionReport out = make_report(criterion::kThm7, lhs, rhs, lhs - rhs, lhs >= rhs, EstimationMode::MonteCarlo);
  out.std_error = standard_error(diff);
  out.n_replicates = static_cast<int>(r);
  return out;
}

CriterionReport thm7_criterion(std::span<const PlsFit> fits, const FullParameter& phi, int min_replicates) {
  std::vector<Matrix> terms;
  terms.reserve(fits.size());
  for (const auto& f : fits) terms.push_back(krylov_terms(f));
  return thm7_criterion(terms, phi, min_replicates);
}

}  // namespace linpred
