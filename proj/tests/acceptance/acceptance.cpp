// One PASS/FAIL line per acceptance criterion; nonzero exit on any failure.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "linpred/born.hpp"
#include "linpred/error.hpp"
#include "linpred/group_actions.hpp"
#include "linpred/optimality.hpp"
#include "linpred/population_pls.hpp"
#include "linpred/simulation.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace linpred;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int k, const std::function<Verdict()>& check) {
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "AC" << k << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
  if (!v.pass) ++failures;
}

std::string fmt(double x) { return format_double(x); }

struct Instance {
  FullParameter phi;
  ReducedParameter theta;
  AlternativeReduction eta;
};

// theta keeps a proper random subset of beta's eigen-coordinates, some of
// them perturbed, so beta(theta) != beta; eta perturbs every coordinate on a
// log-uniform scale so both signs of the criterion occur.
Instance random_instance(oracle::Rng& rng) {
  const int p = oracle::uniform_int(rng, 2, 10);
  const Matrix s = oracle::random_spd(rng, p);
  const FullParameter phi(s, oracle::normal_vector(rng, p), oracle::uniform(rng, 0.0, 2.0));
  const SpectralDecomposition basis = spectral_decomposition(s);
  const Vector coords = basis.eigenvectors.transpose() * phi.beta();
  const int dropped = oracle::uniform_int(rng, 0, p - 1);
  const double keep = oracle::uniform(rng, 0.3, 1.0);
  const double wobble = oracle::uniform(rng, 0.0, 0.5);
  std::vector<ReducedComponent> comps;
  for (Index j = 0; j < p; ++j) {
    if (j == dropped || oracle::uniform(rng, 0, 1) >= keep) continue;
    const double g = coords(j) * (1.0 + wobble * oracle::normal_vector(rng, 1)(0));
    if (g != 0.0) comps.push_back({g, basis.eigenvectors.col(j), basis.eigenvalues(j)});
  }
  const double spread = std::exp(oracle::uniform(rng, std::log(0.01), std::log(3.0)));
  const Vector noise = oracle::normal_vector(rng, p).cwiseProduct(coords.cwiseAbs() + Vector::Constant(p, 0.1));
  return {phi, ReducedParameter(p, comps, 0.0), {coords + spread * noise}};
}

Verdict ac1() {
  oracle::Rng rng(1001);
  const auto start = Clock::now();
  int bad_value = 0, bad_sign = 0, positive = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Instance inst = random_instance(rng);
    const Vector be = beta_of_eta(inst.eta, spectral_decomposition(inst.phi.sigma_xx()));
    const Vector bt = beta_of_theta(inst.theta);
    const double te = tau(be, inst.phi);
    const double delta = te - tau(bt, inst.phi);
    const double f = big_F(inst.phi, inst.theta, inst.eta);
    const double rel = std::abs(delta - f) / std::max(1.0, std::abs(te));
    worst = std::max(worst, rel);
    bad_value += rel > 1e-10;
    bad_sign += (f > 0) != (delta > 0) || (f < 0) != (delta < 0);
    positive += f > 0;
  }
  const double secs = seconds_since(start);
  return {bad_value == 0 && bad_sign == 0 && secs < 5.0,
          "1000 instances, worst scaled gap " + fmt(worst) + ", sign mismatches " + std::to_string(bad_sign) +
              ", F>0 in " + std::to_string(positive) + ", " + fmt(secs) + " s"};
}

Verdict ac2() {
  oracle::Rng rng(1002);
  const auto start = Clock::now();
  int wrong_stop = 0, big_weight = 0, wrong_beta = 0;
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    const int p = oracle::uniform_int(rng, 2, 12);
    const int m = oracle::uniform_int(rng, 1, p - 1);
    const auto pl = oracle::planted(rng, p, m);
    const FullParameter phi(pl.sigma, pl.sigma_xy, 1.0);
    const PopulationPlsResult r = run_population_pls(phi, p);
    wrong_stop += r.stop_step != m;
    big_weight += r.state.next_weight_norm > 1e-8 * r.state.first_weight_norm;
    const double err = (r.beta - pl.beta).norm();
    worst = std::max(worst, err);
    wrong_beta += err > 1e-7;
  }
  const double secs = seconds_since(start);
  return {wrong_stop == 0 && big_weight == 0 && wrong_beta == 0 && secs < 10.0,
          "500 planted populations, wrong stops " + std::to_string(wrong_stop) + ", residual weights over bound " +
              std::to_string(big_weight) + ", worst |beta_pls - beta| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Verdict ac3() {
  oracle::Rng rng(1003);
  int not_equiv = 0, off = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int p = oracle::uniform_int(rng, 1, 8);
    const Matrix s = oracle::random_spd(rng, p);
    const FullParameter phi(s, oracle::normal_vector(rng, p), 1.0);
    not_equiv += !verify_krylov_equivalence(phi);
    const int m = relevant_component_count(phi);
    const Vector brute = oracle::sigma_projection(s, oracle::raw_krylov(s, phi.sigma_xy(), m), phi.beta());
    const double err = (run_population_pls(phi, p).beta - brute).norm() / std::max(1.0, phi.beta().norm());
    worst = std::max(worst, err);
    off += err > 1e-7;
  }
  return {not_equiv == 0 && off == 0, "200 SPD instances, equivalence failures " + std::to_string(not_equiv) +
                                          ", worst oracle gap " + fmt(worst)};
}

Verdict ac4() {
  oracle::Rng rng(1004);
  int triggered = 0, violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const Instance inst = random_instance(rng);
    if (!corollary2_check(inst.phi, inst.theta, inst.eta).satisfied) continue;
    ++triggered;
    violations += !(big_F(inst.phi, inst.theta, inst.eta) > 0.0);
  }
  return {violations == 0 && triggered > 0, "10000 instances, condition held in " + std::to_string(triggered) +
                                                ", violations " + std::to_string(violations)};
}

Verdict ac5() {
  oracle::Rng rng(1005);
  int designs = 0, violations = 0, mc_checked = 0, mc_off = 0;
  double worst_z = 0.0;
  while (designs < 100) {
    const int p = oracle::uniform_int(rng, 2, 10);
    const int m = oracle::uniform_int(rng, 1, p - 1);
    std::vector<double> lambdas(p), irr(p - m);
    GammaPrior prior;
    for (auto& l : lambdas) l = oracle::uniform(rng, 0.1, 10.0);
    for (int j = 0; j < m; ++j) {
      prior.components.emplace_back(NormalPrior{oracle::normal_vector(rng, 1)(0), oracle::uniform(rng, 0.1, 2.0)});
    }
    for (auto& g : irr) g = 0.5 * oracle::normal_vector(rng, 1)(0);
    if (!thm5_criterion(prior, lambdas, irr).satisfied) continue;
    ++designs;
    for (int k = 0; k < 50; ++k) {
      const Vector zeta = 3.0 * oracle::normal_vector(rng, p);
      const std::span<const double> z(zeta.data(), static_cast<std::size_t>(p));
      violations += !thm4_criterion(prior, lambdas, irr, z).satisfied;
      if (k == 0 && designs <= 5) {
        Thm4Options mc;
        mc.mode = EstimationMode::MonteCarlo;
        mc.draws = 100000;
        mc.seed = static_cast<std::uint64_t>(designs);
        const CriterionReport exact = thm4_criterion(prior, lambdas, irr, z);
        const CriterionReport sampled = thm4_criterion(prior, lambdas, irr, z, mc);
        const double zscore = std::abs(sampled.rhs - exact.rhs) / *sampled.std_error;
        worst_z = std::max(worst_z, zscore);
        ++mc_checked;
        mc_off += zscore > 3.0;
      }
    }
  }
  return {violations == 0 && mc_off == 0,
          "100 designs x 50 rivals, violations " + std::to_string(violations) + "; analytic vs 1e5-draw Monte Carlo on " +
              std::to_string(mc_checked) + " designs, worst |z| " + fmt(worst_z)};
}

Verdict ac6() {
  cli::ExperimentConfig cfg = cli::load_experiment_config(fs::path(LINPRED_SOURCE_DIR) / "configs" / "desk_pls2.json");
  cfg.design.seed = 7;
  ExperimentOptions options;
  options.threads = 1;
  options.criteria = {"thm6", "thm7"};
  const auto start = Clock::now();
  const std::vector<McResult> res = msep_experiment(cfg.design, cfg.estimators, cfg.replicates, options);
  const double secs = seconds_since(start);

  const McResult& pls = res.front();
  if (pls.estimator != "pls:2" || pls.criteria.empty()) return {false, "first estimator is not pls:2 with thm7"};
  const CriterionReport& t7 = pls.criteria.front();
  const bool dominance = t7.satisfied && t7.margin > 3.0 * t7.std_error.value_or(INFINITY);
  const double pls_hi = pls.msep_mean + 1.96 * pls.msep_stderr;
  bool separated = true;
  std::ostringstream rivals;
  for (std::size_t e = 1; e < res.size(); ++e) {
    const double lo = res[e].msep_mean - 1.96 * res[e].msep_stderr;
    separated = separated && pls_hi < lo;
    rivals << ' ' << res[e].estimator << '=' << fmt(res[e].msep_mean);
  }
  return {dominance && separated && secs < 120.0 && res.size() == 9,
          "Krylov-term criterion margin " + fmt(t7.margin) + " vs 3 stderr " + fmt(3.0 * t7.std_error.value_or(NAN)) + "; pls:2 msep " +
              fmt(pls.msep_mean) + " (95% upper " + fmt(pls_hi) + "), rivals" + rivals.str() + "; " + fmt(secs) + " s"};
}

PiecewiseLinearMap random_origin_map(oracle::Rng& rng) {
  const bool increasing = oracle::uniform(rng, 0, 1) < 0.7;
  const double s1 = oracle::uniform(rng, 0.2, 3.0), s2 = oracle::uniform(rng, 0.2, 3.0);
  std::vector<double> y = increasing ? std::vector<double>{-10 * s1, 0.0, 10 * s2}
                                     : std::vector<double>{10 * s1, 0.0, -10 * s2};
  return {{-10.0, 0.0, 10.0}, y};
}

Verdict ac7() {
  oracle::Rng rng(1007);
  int changed = 0;
  for (int t = 0; t < 500; ++t) {
    const int p = oracle::uniform_int(rng, 2, 8);
    const int m = oracle::uniform_int(rng, 0, p);
    const auto pl = oracle::planted(rng, p, m);
    const FullParameter phi(pl.sigma, pl.sigma_xy, 1.0);
    std::vector<ScaleMap> maps;
    for (int j = 0; j < p; ++j) {
      if (oracle::uniform(rng, 0, 1) < 0.5) {
        maps.emplace_back(LinearScale{oracle::uniform(rng, 0.1, 5.0)});
      } else {
        maps.emplace_back(random_origin_map(rng));
      }
    }
    const FullParameter out = apply_K({oracle::random_orthogonal(rng, p), maps}, phi);
    changed += orbit_invariant_nonzero_count(out) != orbit_invariant_nonzero_count(phi);
  }
  const auto pl = oracle::planted(rng, 6, 2);
  const FullParameter phi(pl.sigma, pl.sigma_xy, 1.0);
  const PiecewiseLinearMap shift({0, 1}, {1, 2});
  const FullParameter moved = apply_K({Matrix::Identity(6, 6), std::vector<ScaleMap>(6, shift)}, phi);
  const int before = orbit_invariant_nonzero_count(phi), after = orbit_invariant_nonzero_count(moved);
  return {changed == 0 && before != after, "500 actions, count changes " + std::to_string(changed) +
                                               "; g(0)=1 moves the count " + std::to_string(before) + " -> " +
                                               std::to_string(after)};
}

Verdict ac8() {
  oracle::Rng rng(1008);
  double worst_mixed = 0.0, worst_sum = 0.0;
  auto xi = [](double x) { return std::exp(0.3 * x) + x * x; };
  for (Index r = 1; r <= 16; ++r) {
    for (int t = 0; t < 10; ++t) {
      const SpectralOperator op(oracle::normal_vector(rng, r), oracle::random_unitary(rng, r));
      double avg = 0.0;
      for (Index i = 0; i < r; ++i) avg += xi(op.eigenvalues()(i));
      avg /= static_cast<double>(r);
      worst_mixed = std::max(worst_mixed, std::abs(born_expectation(DensityOperator::maximally_mixed(r), op, xi) - avg) /
                                              std::max(1.0, std::abs(avg)));

      Vector p(r);
      for (Index i = 0; i < r; ++i) p(i) = oracle::uniform(rng, 0.0, 1.0);
      p /= p.sum();
      const CMatrix u = oracle::random_unitary(rng, r);
      const double want = oracle::born_double_sum(p, u, op.eigenvalues(), op.eigenvectors(), xi);
      const double got = born_expectation(DensityOperator::mixture(p, u), op, xi);
      worst_sum = std::max(worst_sum, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
  }
  const GammaPrior prior{{NormalPrior{0.5, 1.5}, NormalPrior{-1.0, 0.7}}, true};
  const std::vector<double> lambdas{4.0, 2.0};
  const double exact = 4.0 * 2.25 + 2.0 * 0.49;
  const double e64 = std::abs(criterion46_via_born(prior, lambdas, 2, 64) - exact);
  const double e128 = std::abs(criterion46_via_born(prior, lambdas, 2, 128) - exact);
  return {worst_mixed <= 1e-12 && worst_sum <= 1e-10 && e128 <= 0.5 * e64,
          "mixed-state gap " + fmt(worst_mixed) + ", double-sum gap " + fmt(worst_sum) + ", grid error 64 -> 128: " +
              fmt(e64) + " -> " + fmt(e128)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict ac9() {
  const fs::path root = fs::temp_directory_path() / "linpred_acceptance_determinism";
  fs::remove_all(root);
  const std::string config = (fs::path(LINPRED_SOURCE_DIR) / "configs" / "desk_pls2.json").string();
  auto run = [&](const std::string& tag, const std::string& threads) {
    std::ostringstream out, err;
    const int code = cli::run({"simulate", "--config", config, "--seed", "2024", "--threads", threads, "--output-dir",
                               (root / tag).string()},
                              out, err);
    if (code != 0) throw std::runtime_error("simulate exited with " + std::to_string(code) + ": " + err.str());
    return out.str() + '\x1f' + slurp(root / tag / "results.csv") + '\x1f' + slurp(root / tag / "results.json");
  };
  const std::string a = run("first", "1"), b = run("second", "1"), c = run("eight", "8");
  fs::remove_all(root);
  return {a == b && a == c, std::string("same seed reruns ") + (a == b ? "identical" : "differ") +
                                ", threads 1 vs 8 " + (a == c ? "identical" : "differ")};
}

}  // namespace

int main() {
  report(1, ac1);
  report(2, ac2);
  report(3, ac3);
  report(4, ac4);
  report(5, ac5);
  report(6, ac6);
  report(7, ac7);
  report(8, ac8);
  report(9, ac9);
  return failures == 0 ? 0 : 1;
}
