#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "linpred/estimators.hpp"
#include "linpred/model_core.hpp"
#include "linpred/optimality.hpp"
#include "linpred/random.hpp"
#include "linpred/sample_pls.hpp"

namespace linpred {

/// Knobs of a synthetic population: m relevant eigen-directions carrying
/// gamma, p - m irrelevant ones carrying `irrelevant_gamma` (zero for an exact
/// m-component model), residual variance sigma2 and sample size n.
struct DesignSpec {
  int p = 0;
  int m = 0;
  std::vector<double> relevant_lambdas;
  std::vector<double> irrelevant_lambdas;
  /// Fixed relevant coefficients; ignored when `gamma_prior` is set.
  std::vector<double> gamma;
  /// When present, gamma is drawn once from the prior on the population stream.
  std::optional<GammaPrior> gamma_prior;
  std::vector<double> irrelevant_gamma;
  double sigma2 = 1.0;
  int n = 0;
  std::uint64_t seed = 0;

  /// Throws InvalidSpec.
  void validate() const;
};

struct Population {
  FullParameter phi;
  ReducedParameter theta;
  Matrix eigenbasis;  // columns: relevant directions first, then irrelevant
  Vector gamma;       // coordinates of beta on `eigenbasis`
};

/// Stream 0 of the design seed draws the rotation (and gamma when a prior is
/// given); replicate r uses stream r + 1.
Population build_population(const DesignSpec& spec);

/// x ~ N(0, sigma_xx), y = beta.x + eps, eps ~ N(0, sigma2).
Dataset sample_dataset(const FullParameter& phi, int n, Philox4x32& stream);

struct McResult {
  std::string estimator;
  double msep_mean = 0.0;
  double msep_stderr = 0.0;
  int n_replicates = 0;
  int skipped = 0;
  std::vector<CriterionReport> criteria;
};

struct ExperimentOptions {
  /// 0 selects std::thread::hardware_concurrency().
  int threads = 0;
  /// Any of "thm6", "thm7" (or their full report names).
  std::vector<std::string> criteria;
  /// 0: exact conditional MSEP through tau. Otherwise the average squared
  /// error of b.x on this many fresh test draws per replicate.
  int empirical_test_size = 0;
  double max_skip_fraction = 0.05;
  PlsOptions pls;
};

inline constexpr int kMinExperimentReplicates = 30;

/// One McResult per estimator, in input order. thm7 is attached to each pls
/// estimator; thm6 to every other estimator, against the first pls estimator.
/// Throws ExperimentPolicy when an estimator fails on more than
/// max_skip_fraction of the replicates.
std::vector<McResult> msep_experiment(const DesignSpec& spec, const std::vector<EstimatorSpec>& estimators,
                                      int replicates, const ExperimentOptions& options = {});

}  // namespace linpred
