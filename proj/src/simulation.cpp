#include "linpred/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "linpred/error.hpp"

namespace linpred {

void DesignSpec::validate() const {
  auto fail = [](const std::string& why) { return Error(ErrorCode::InvalidSpec, why); };
  if (p < 1) throw fail("p must be >= 1");
  if (m < 0 || m > p) throw fail("m must lie in [0, p]");
  if (static_cast<int>(relevant_lambdas.size()) != m) throw fail("need m relevant eigenvalues");
  if (static_cast<int>(irrelevant_lambdas.size()) != p - m) throw fail("need p - m irrelevant eigenvalues");
  for (double l : relevant_lambdas) if (!(l > 0.0) || !std::isfinite(l)) throw fail("eigenvalues must be positive");
  for (double l : irrelevant_lambdas) if (!(l > 0.0) || !std::isfinite(l)) throw fail("eigenvalues must be positive");
  if (gamma_prior) {
    if (static_cast<int>(gamma_prior->m()) != m) throw fail("gamma prior must have m components");
    try {
      validate_prior(*gamma_prior);
    } catch (const Error& e) {
      throw fail(e.what());
    }
  } else {
    if (static_cast<int>(gamma.size()) != m) throw fail("need m relevant gamma values");
    for (double g : gamma) if (g == 0.0 || !std::isfinite(g)) throw fail("relevant gamma must be finite and nonzero");
  }
  if (!irrelevant_gamma.empty() && static_cast<int>(irrelevant_gamma.size()) != p - m) {
    throw fail("irrelevant_gamma must be empty or have p - m entries");
  }
  for (double g : irrelevant_gamma) if (!std::isfinite(g)) throw fail("irrelevant gamma must be finite");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw fail("sigma2 must be finite and >= 0");
  if (n < 2) throw fail("n must be >= 2");
}

Population build_population(const DesignSpec& spec) {
  spec.validate();
  const Index p = spec.p;
  const Index m = spec.m;
  Philox4x32 engine(spec.seed, 0);
  const Matrix q = haar_orthogonal(engine, p);

  Vector lambdas(p);
  Vector gamma = Vector::Zero(p);
  for (Index j = 0; j < m; ++j) {
    lambdas(j) = spec.relevant_lambdas[static_cast<std::size_t>(j)];
    gamma(j) = spec.gamma_prior ? draw(spec.gamma_prior->components[static_cast<std::size_t>(j)], engine)
                                : spec.gamma[static_cast<std::size_t>(j)];
    if (gamma(j) == 0.0) throw Error(ErrorCode::InvalidSpec, "drawn relevant gamma is exactly zero");
  }
  for (Index j = m; j < p; ++j) {
    lambdas(j) = spec.irrelevant_lambdas[static_cast<std::size_t>(j - m)];
    if (!spec.irrelevant_gamma.empty()) gamma(j) = spec.irrelevant_gamma[static_cast<std::size_t>(j - m)];
  }

  Matrix sigma = q * lambdas.asDiagonal() * q.transpose();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  const Vector beta = q * gamma;
  Vector sigma_xy = sigma * beta;

  std::vector<ReducedComponent> comps;
  for (Index j = 0; j < m; ++j) comps.push_back({gamma(j), q.col(j), lambdas(j)});
  std::stable_sort(comps.begin(), comps.end(), [](const ReducedComponent& a, const ReducedComponent& b) {
    return std::abs(a.gamma) * a.eigenvalue > std::abs(b.gamma) * b.eigenvalue;
  });

  return Population{FullParameter(std::move(sigma), std::move(sigma_xy), spec.sigma2),
                    ReducedParameter(p, std::move(comps), 0.0), q, gamma};
}

Dataset sample_dataset(const FullParameter& phi, int n, Philox4x32& stream) {
  if (n < 2) throw Error(ErrorCode::InvalidInput, "n must be >= 2");
  const Index p = phi.p();
  const Eigen::LLT<Matrix> llt(phi.sigma_xx());
  const Matrix l = llt.matrixL();
  const double sigma = std::sqrt(phi.sigma2());
  Matrix x(n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const Vector z = standard_normal_vector(stream, p);
    const Vector xi = l * z;
    x.row(i) = xi.transpose();
    y(i) = phi.beta().dot(xi) + sigma * standard_normal(stream);
  }
  return Dataset(std::move(x), std::move(y));
}

namespace {

struct ReplicateOutcome {
  std::vector<std::optional<Vector>> betas;     // per estimator
  std::vector<std::optional<Matrix>> terms;     // Krylov terms, pls estimators only
  std::vector<double> msep;                     // per estimator, NaN when skipped
};

bool wants(const std::vector<std::string>& names, const char* shorthand, const char* full) {
  return std::any_of(names.begin(), names.end(), [&](const std::string& s) { return s == shorthand || s == full; });
}

}  // namespace

std::vector<McResult> msep_experiment(const DesignSpec& spec, const std::vector<EstimatorSpec>& estimators,
                                      int replicates, const ExperimentOptions& options) {
  if (replicates < kMinExperimentReplicates) {
    throw Error(ErrorCode::InsufficientReplicates,
                "an experiment needs >= " + std::to_string(kMinExperimentReplicates) + " replicates");
  }
  if (estimators.empty()) throw Error(ErrorCode::InvalidInput, "no estimators given");
  for (const auto& name : options.criteria) {
    if (!wants({name}, "thm6", criterion::kThm6) && !wants({name}, "thm7", criterion::kThm7)) {
      throw Error(ErrorCode::InvalidInput, "unknown experiment criterion '" + name + "'");
    }
  }
  const Population pop = build_population(spec);
  const FullParameter& phi = pop.phi;
  const std::size_t k = estimators.size();
  const auto reps = static_cast<std::size_t>(replicates);

  std::vector<ReplicateOutcome> outcomes(reps);
  auto run_one = [&](std::size_t r) {
    Philox4x32 stream(spec.seed, static_cast<std::uint64_t>(r) + 1);
    const Dataset data = sample_dataset(phi, spec.n, stream);
    ReplicateOutcome out;
    out.betas.resize(k);
    out.terms.resize(k);
    out.msep.assign(k, std::nan(""));
    for (std::size_t e = 0; e < k; ++e) {
      try {
        LinearFit f = fit(estimators[e], data, options.pls);
        if (f.pls) out.terms[e] = krylov_terms(*f.pls);
        out.betas[e] = std::move(f.beta);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::RankDeficientKrylov && err.code() != ErrorCode::SingularDesign) throw;
      }
    }
    // Test draws come after the training sample on the same stream, shared by all estimators.
    if (options.empirical_test_size > 0) {
      const Dataset test = sample_dataset(phi, std::max(options.empirical_test_size, 2), stream);
      for (std::size_t e = 0; e < k; ++e) {
        if (!out.betas[e]) continue;
        const Vector resid = test.y() - test.x() * *out.betas[e];
        std::vector<double> sq(static_cast<std::size_t>(resid.size()));
        for (Index i = 0; i < resid.size(); ++i) sq[static_cast<std::size_t>(i)] = resid(i) * resid(i);
        out.msep[e] = mean(sq);
      }
    } else {
      for (std::size_t e = 0; e < k; ++e) {
        if (out.betas[e]) out.msep[e] = tau(*out.betas[e], phi);
      }
    }
    outcomes[r] = std::move(out);
  };

  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, replicates);
  if (threads == 1) {
    for (std::size_t r = 0; r < reps; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
          for (std::size_t r = next++; r < reps; r = next++) {
            try {
              run_one(r);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<McResult> results(k);
  for (std::size_t e = 0; e < k; ++e) {
    std::vector<double> values;
    values.reserve(reps);
    for (const auto& o : outcomes) {
      if (!std::isnan(o.msep[e])) values.push_back(o.msep[e]);
    }
    McResult& res = results[e];
    res.estimator = estimators[e].to_string();
    res.n_replicates = static_cast<int>(values.size());
    res.skipped = static_cast<int>(reps - values.size());
    if (static_cast<double>(res.skipped) > options.max_skip_fraction * static_cast<double>(reps)) {
      throw Error(ErrorCode::ExperimentPolicy, res.estimator + " failed on " + std::to_string(res.skipped) + " of " +
                                                   std::to_string(reps) + " replicates");
    }
    res.msep_mean = mean(values);
    res.msep_stderr = standard_error(values);
  }

  const bool want6 = wants(options.criteria, "thm6", criterion::kThm6);
  const bool want7 = wants(options.criteria, "thm7", criterion::kThm7);
  const auto reference = std::find_if(estimators.begin(), estimators.end(),
                                      [](const EstimatorSpec& s) { return s.kind == EstimatorSpec::Kind::Pls; });
  const std::size_t ref = static_cast<std::size_t>(reference - estimators.begin());
  for (std::size_t e = 0; e < k; ++e) {
    const bool is_pls = estimators[e].kind == EstimatorSpec::Kind::Pls;
    if (is_pls && want7) {
      std::vector<Matrix> terms;
      for (const auto& o : outcomes) if (o.terms[e]) terms.push_back(*o.terms[e]);
      if (static_cast<int>(terms.size()) >= kMinCriterionReplicates) {
        results[e].criteria.push_back(thm7_criterion(terms, phi));
      }
    }
    if (!is_pls && want6 && reference != estimators.end()) {
      std::vector<Vector> rival, pls;
      for (const auto& o : outcomes) {
        if (o.betas[e] && o.betas[ref]) {
          rival.push_back(*o.betas[e]);
          pls.push_back(*o.betas[ref]);
        }
      }
      if (static_cast<int>(pls.size()) >= kMinCriterionReplicates) {
        results[e].criteria.push_back(thm6_criterion(rival, pls, phi));
      }
    }
  }
  return results;
}

}  // namespace linpred
