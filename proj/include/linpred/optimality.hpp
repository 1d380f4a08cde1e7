#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "linpred/model_core.hpp"
#include "linpred/random.hpp"
#include "linpred/sample_pls.hpp"

namespace linpred {

enum class EstimationMode { Exact, Analytic, MonteCarlo };

std::string_view to_string(EstimationMode mode) noexcept;

/// Both sides of one optimality inequality. `margin` is oriented so that a
/// positive value means the inequality holds.
struct CriterionReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool satisfied = false;
  std::optional<double> std_error;
  int n_replicates = 0;
  EstimationMode mode = EstimationMode::Exact;
};

namespace criterion {
inline constexpr const char* kAssumptionA = "assumption_A";
inline constexpr const char* kCorollary2 = "cor2";
inline constexpr const char* kThm4 = "thm4_eq37";
inline constexpr const char* kThm5 = "thm5_eq46";
inline constexpr const char* kThm6 = "thm6_eq31";
inline constexpr const char* kThm7 = "thm7_eq47";
}  // namespace criterion

// ---------------------------------------------------------------------------
// Priors on the relevant coefficients gamma_1..gamma_m.

struct NormalPrior {
  double mean = 0.0;
  double sd = 1.0;
};

struct PointMassPrior {
  double value = 0.0;
};

/// Density proportional to 1/gamma on [lo, hi]; a proper stand-in for the
/// scale-invariant measure d(gamma)/gamma.
struct LogUniformPrior {
  double lo = 1.0;
  double hi = 10.0;
};

using GammaComponentPrior = std::variant<NormalPrior, PointMassPrior, LogUniformPrior>;

struct GammaPrior {
  std::vector<GammaComponentPrior> components;
  bool independent = true;

  std::size_t m() const noexcept { return components.size(); }
};

/// Throws UnsupportedPrior for correlated priors or invalid parameters.
void validate_prior(const GammaPrior& prior);

double prior_mean(const GammaComponentPrior& c);
double prior_variance(const GammaComponentPrior& c);
double draw(const GammaComponentPrior& c, Philox4x32& engine);

// ---------------------------------------------------------------------------
// Exact prediction-error identities.

/// E(y - b.x)^2 = sigma2 + (beta - b)' sigma_xx (beta - b).
double tau(const Vector& beta_candidate, const FullParameter& phi);

/// (beta_eta + beta_theta - 2 beta)' sigma_xx (beta_eta - beta_theta), so that
/// tau(beta_eta) = tau(beta_theta) + F.
double big_F(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta);

/// eta's coordinates are read on the canonical eigenbasis of sigma_xx.
double big_F(const FullParameter& phi, const ReducedParameter& theta, const AlternativeReduction& eta);

CriterionReport assumption_A(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta);
CriterionReport assumption_A(const FullParameter& phi, const ReducedParameter& theta, const AlternativeReduction& eta);

CriterionReport corollary2_check(const FullParameter& phi, const Vector& beta_theta, const Vector& beta_eta);
CriterionReport corollary2_check(const FullParameter& phi, const ReducedParameter& theta,
                                 const AlternativeReduction& eta);

// ---------------------------------------------------------------------------
// Criteria averaged over a prior on gamma. Coordinates are on a fixed
// eigenbasis whose first m entries are the relevant components.

struct Thm4Options {
  /// Analytic for normal and point-mass priors, Monte Carlo otherwise.
  std::optional<EstimationMode> mode;
  int draws = 100000;
  std::uint64_t seed = 0x6a09e667f3bcc908ULL;
};

/// lhs = 4 sum_{j>m} gamma_j^2 lambda_j,
/// rhs = E sum_{j<=m} (zeta_j - gamma_j)^2 lambda_j + sum_{j>m} zeta_j^2 lambda_j.
CriterionReport thm4_criterion(const GammaPrior& prior, std::span<const double> lambdas,
                               std::span<const double> irrelevant_gammas, std::span<const double> zeta,
                               const Thm4Options& options = {});

/// lhs = sum_{j<=m} lambda_j Var(gamma_j), rhs = 4 sum_{j>m} gamma_j^2 lambda_j.
CriterionReport thm5_criterion(const GammaPrior& prior, std::span<const double> lambdas,
                               std::span<const double> irrelevant_gammas);

struct Thm5ProfilePoint {
  int m;
  double lhs;
  double rhs;
};

/// Both sides of the relevant-variance criterion for every split m = 1..p-1,
/// given per-coordinate variances (relevant side) and coefficients (irrelevant side).
std::vector<Thm5ProfilePoint> thm5_profile(std::span<const double> lambdas, std::span<const double> variances,
                                           std::span<const double> gammas);

// ---------------------------------------------------------------------------
// Criteria over replicated datasets.

inline constexpr int kMinCriterionReplicates = 100;

/// lhs = E (b - b_a)' S (b - b_a), rhs = 4 E (beta - b_a)' S (beta - b_a), with
/// replicate averages; `std_error` is the standard error of the margin.
CriterionReport thm6_criterion(std::span<const Vector> rival, std::span<const Vector> pls, const FullParameter& phi,
                               int min_replicates = kMinCriterionReplicates);

/// Krylov terms alpha_j e_j of one PLS fit, stacked as columns (p x a).
Matrix krylov_terms(const PlsFit& fit);

/// lhs = trace(S W) with W the summed covariance of the Krylov terms,
/// rhs = 4 E (beta - b_a)' S (beta - b_a).
CriterionReport thm7_criterion(std::span<const Matrix> terms, const FullParameter& phi,
                               int min_replicates = kMinCriterionReplicates);
CriterionReport thm7_criterion(std::span<const PlsFit> fits, const FullParameter& phi,
                               int min_replicates = kMinCriterionReplicates);

}  // namespace linpred
