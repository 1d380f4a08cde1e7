#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "linpred/born.hpp"
#include "linpred/error.hpp"
#include "linpred/optimality.hpp"
#include "linpred/serialization.hpp"

namespace linpred::cli {

namespace {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path.string() + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidInput, "cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << content;
}

void emit(const Json& doc, const std::string& output_dir, const std::string& name, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (output_dir.empty()) {
    out << text;
  } else {
    std::filesystem::create_directories(output_dir);
    write_file(std::filesystem::path(output_dir) / name, text);
  }
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string csv;
  int components = 1;
  bool header = false;
  std::string divisor = "n-1";
  int cv_folds = 0;
  int cv_max = 0;
  std::string output_dir;
};

int cmd_fit(const FitArgs& args, std::ostream& out) {
  const Dataset data = Dataset::from_csv(args.csv, args.header);
  PlsOptions options;
  options.divisor = args.divisor == "n" ? CovarianceDivisor::N : CovarianceDivisor::NMinusOne;
  const PlsFit fit = fit_pls(data, args.components, options);

  double sse = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    const double r = data.y()(i) - predict(fit, data.x().row(i).transpose());
    sse += r * r;
  }
  Json doc = to_json(fit);
  doc["n"] = data.n();
  doc["p"] = data.p();
  doc["training_msep"] = sse / static_cast<double>(data.n());
  if (args.cv_folds > 0) {
    const int max_a = args.cv_max > 0 ? args.cv_max : static_cast<int>(data.p());
    Json table = Json::array();
    for (const auto& pt : cross_validate_components(data, max_a, args.cv_folds, options)) {
      table.push_back({{"a", pt.a},
                       {"msep", std::isfinite(pt.msep) ? Json(pt.msep) : Json(nullptr)},
                       {"failed_folds", pt.failed_folds}});
    }
    doc["cross_validation"] = {{"folds", args.cv_folds}, {"table", table}};
  }
  emit(doc, args.output_dir, "fit.json", out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output_dir = ".";
  std::string format = "both";
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(args.config);
  cfg.design.seed = args.seed;
  ExperimentOptions options;
  options.threads = args.threads;
  options.criteria = cfg.criteria;
  options.empirical_test_size = cfg.empirical_test_size;
  const std::vector<McResult> results = msep_experiment(cfg.design, cfg.estimators, cfg.replicates, options);

  std::filesystem::create_directories(args.output_dir);
  const std::filesystem::path dir(args.output_dir);
  if (args.format == "csv" || args.format == "both") {
    std::ostringstream csv;
    write_results_csv(csv, results);
    write_file(dir / cfg.csv_name, csv.str());
  }
  if (args.format == "json" || args.format == "both") {
    Json doc{{"design", to_json(cfg.design)}, {"replicates", cfg.replicates}, {"results", Json::array()}};
    for (const auto& r : results) doc["results"].push_back(to_json(r));
    write_file(dir / cfg.json_name, doc.dump(2) + "\n");
  }
  for (const auto& r : results) {
    out << r.estimator << "  msep " << format_double(r.msep_mean) << " +/- " << format_double(r.msep_stderr);
    for (const auto& c : r.criteria) out << "  " << c.name << (c.satisfied ? " satisfied" : " not satisfied");
    out << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct CriteriaArgs {
  std::string criterion = "model";
  std::string population;
  std::string zeta;
  bool eta_equals_theta = false;
  std::uint64_t eta_seed = 0;
  bool random_eta = false;
  std::string lambdas;
  std::string variances;
  std::string prior;
  std::string irrelevant_gammas;
  std::string output_dir;
};

GammaPrior prior_from_args(const CriteriaArgs& args) {
  if (!args.prior.empty()) return gamma_prior_from_json(read_json_file(args.prior));
  GammaPrior prior;
  for (double v : parse_list(args.variances)) {
    if (v < 0.0) throw Error(ErrorCode::InvalidInput, "variances must be >= 0");
    prior.components.emplace_back(NormalPrior{0.0, std::sqrt(v)});
  }
  return prior;
}

int cmd_criteria(const CriteriaArgs& args, std::ostream& out) {
  Json reports = Json::array();
  if (args.criterion == "model") {
    if (args.population.empty()) throw Error(ErrorCode::InvalidInput, "--population is required");
    const FullParameter phi = full_parameter_from_json(read_json_file(args.population));
    const ReducedParameter theta = reduce_to_theta(phi, relevant_component_count(phi));
    const Vector beta_theta = beta_of_theta(theta);
    Vector beta_eta;
    if (args.eta_equals_theta) {
      beta_eta = beta_theta;
    } else {
      Vector zeta;
      if (args.random_eta) {
        Philox4x32 engine(args.eta_seed, 0);
        zeta = standard_normal_vector(engine, phi.p());
      } else {
        const std::vector<double> z = parse_list(args.zeta);
        zeta = Eigen::Map<const Vector>(z.data(), static_cast<Index>(z.size()));
      }
      beta_eta = beta_of_eta({zeta}, spectral_decomposition(phi.sigma_xx()));
    }
    reports.push_back(to_json(assumption_A(phi, beta_theta, beta_eta)));
    reports.push_back(to_json(corollary2_check(phi, beta_theta, beta_eta)));
  } else if (args.criterion == "thm4" || args.criterion == "thm5") {
    const GammaPrior prior = prior_from_args(args);
    const std::vector<double> lambdas = parse_list(args.lambdas);
    const std::vector<double> gammas = parse_list(args.irrelevant_gammas);
    if (args.criterion == "thm5") {
      reports.push_back(to_json(thm5_criterion(prior, lambdas, gammas)));
    } else {
      const std::vector<double> zeta = parse_list(args.zeta);
      reports.push_back(to_json(thm4_criterion(prior, lambdas, gammas, zeta)));
    }
  } else {
    throw Error(ErrorCode::InvalidInput, "unknown criterion '" + args.criterion + "'");
  }
  emit(reports, args.output_dir, "criteria.json", out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BornArgs {
  int r = 4;
  std::uint64_t seed = 1;
  std::vector<int> grids{16, 32, 64, 128, 256, 512};
};

int cmd_born_demo(const BornArgs& args, std::ostream& out) {
  if (args.r < 1) throw Error(ErrorCode::InvalidInput, "r must be >= 1");
  Philox4x32 engine(args.seed, 0);
  const Index r = args.r;
  CMatrix g(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) g(i, j) = {standard_normal(engine), standard_normal(engine)};
  const CMatrix h = 0.5 * (g + g.adjoint());
  const SpectralOperator op = SpectralOperator::from_hermitian(h);
  const ScalarFunction square = [](double t) { return t * t; };
  const double born = born_expectation(DensityOperator::maximally_mixed(r), op, square);
  double avg = 0.0;
  for (Index i = 0; i < r; ++i) avg += square(op.eigenvalues()(i));
  avg /= static_cast<double>(r);

  GammaPrior prior{{NormalPrior{0.0, 1.0}}, true};
  const std::vector<double> lambda{1.0};
  Json conv = Json::array();
  for (int grid : args.grids) {
    const double v = criterion46_via_born(prior, lambda, 1, grid);
    conv.push_back({{"grid_size", grid}, {"value", v}, {"abs_error", std::abs(v - 1.0)}});
  }
  Json doc{{"maximally_mixed_check",
            {{"r", args.r}, {"born_expectation", born}, {"eigenvalue_mean", avg}, {"abs_diff", std::abs(born - avg)}}},
           {"normal_prior_variance_convergence", conv}};
  out << doc.dump(2) << '\n';
  return kOk;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  ExperimentConfig cfg;
  try {
    if (!j.is_object()) throw Error(ErrorCode::InvalidSpec, "experiment file must hold a JSON object");
    cfg.design = design_spec_from_json(j.at("design"));
    cfg.design.validate();
    cfg.replicates = j.at("replicates").get<int>();
    if (cfg.replicates < kMinExperimentReplicates) {
      throw Error(ErrorCode::InvalidSpec, "replicates must be >= " + std::to_string(kMinExperimentReplicates));
    }
    for (const auto& name : j.value("criteria", std::vector<std::string>{})) {
      if (name != "thm6" && name != "thm7" && name != criterion::kThm6 && name != criterion::kThm7) {
        throw Error(ErrorCode::InvalidSpec, "unknown criterion '" + name + "'");
      }
      cfg.criteria.push_back(name);
    }
    cfg.empirical_test_size = j.value("empirical_test_size", 0);
    if (j.contains("outputs")) {
      cfg.csv_name = j.at("outputs").value("csv", cfg.csv_name);
      cfg.json_name = j.at("outputs").value("json", cfg.json_name);
    }
    const auto names = j.at("estimators").get<std::vector<std::string>>();
    if (names.empty()) throw Error(ErrorCode::InvalidSpec, "estimator list is empty");
    for (const auto& name : names) {
      if (name == "ridge:grid") {
        const Population pop = build_population(cfg.design);
        const double scale = pop.phi.sigma_xx().trace() / static_cast<double>(pop.phi.p());
        for (const auto& spec : default_ridge_grid(scale)) cfg.estimators.push_back(spec);
      } else {
        const EstimatorSpec spec = EstimatorSpec::parse(name);
        if (spec.kind != EstimatorSpec::Kind::Ols && spec.kind != EstimatorSpec::Kind::Ridge &&
            spec.components > cfg.design.p) {
          throw Error(ErrorCode::InvalidSpec, "estimator '" + name + "' uses more than p components");
        }
        cfg.estimators.push_back(spec);
      }
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidSpec, path.string() + ": " + e.what());
  }
  return cfg;
}

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (err == nullptr) return kInputError;
  switch (err->code()) {
    case ErrorCode::NonPositiveDefinite:
    case ErrorCode::DegenerateScore:
    case ErrorCode::RankDeficientKrylov:
    case ErrorCode::SingularGram:
    case ErrorCode::SingularDesign:
      return kNumericalPrecondition;
    case ErrorCode::ExperimentPolicy:
      return kExperimentPolicy;
    default:
      return kInputError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-rank linear prediction: PLS fitting, MSEP experiments and optimality criteria"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit an a-component PLS model to a CSV file");
  fit->add_option("--csv", fit_args.csv, "Predictors in the first p columns, response last")->required();
  fit->add_option("-a,--components", fit_args.components, "Number of PLS components")->required();
  fit->add_flag("--header", fit_args.header, "Skip the first CSV line");
  fit->add_option("--divisor", fit_args.divisor, "Covariance divisor")->check(CLI::IsMember({"n", "n-1"}));
  fit->add_option("--cv-folds", fit_args.cv_folds, "k-fold cross-validation table (0 = off, 5 is typical)");
  fit->add_option("--cv-max", fit_args.cv_max, "Largest component count in the CV table");
  fit->add_option("--output-dir", fit_args.output_dir, "Write fit.json here instead of stdout");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo MSEP experiment");
  sim->add_option("--config", sim_args.config, "Experiment JSON file")->required();
  sim->add_option("--seed", sim_args.seed, "64-bit master seed")->required();
  sim->add_option("--threads", sim_args.threads, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  sim->add_option("--output-dir", sim_args.output_dir, "Directory for results");
  sim->add_option("--format", sim_args.format, "Output format")->check(CLI::IsMember({"csv", "json", "both"}));

  CriteriaArgs crit_args;
  auto* crit = app.add_subcommand("criteria", "Evaluate optimality criteria");
  crit->add_option("--criterion", crit_args.criterion, "model (assumption_A and cor2 reports), thm4 or thm5")
      ->check(CLI::IsMember({"model", "thm4", "thm5"}));
  crit->add_option("--population", crit_args.population, "FullParameter JSON file");
  crit->add_option("--zeta", crit_args.zeta, "Rival coordinates on the eigenbasis, comma-separated");
  crit->add_flag("--eta-equals-theta", crit_args.eta_equals_theta, "Use the PLS reduction itself as the rival");
  auto* eta_seed = crit->add_option("--eta-seed", crit_args.eta_seed, "Draw rival coordinates from N(0, 1)");
  crit->add_option("--lambdas", crit_args.lambdas, "Eigenvalues, relevant first");
  crit->add_option("--variances", crit_args.variances, "Prior variances of the relevant gammas (normal priors)");
  crit->add_option("--prior", crit_args.prior, "GammaPrior JSON file");
  crit->add_option("--irrelevant-gammas", crit_args.irrelevant_gammas, "Coefficients beyond the first m");
  crit->add_option("--output-dir", crit_args.output_dir, "Write criteria.json here instead of stdout");

  BornArgs born_args;
  auto* born = app.add_subcommand("born-demo", "Check the maximally-mixed Born expectation identity");
  born->add_option("--r", born_args.r, "Operator dimension");
  born->add_option("--seed", born_args.seed, "Seed for the random operator");
  born->add_option("--grids", born_args.grids, "Grid sizes for the variance convergence table");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << '\n';
    return kInputError;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_args, out);
    if (sim->parsed()) return cmd_simulate(sim_args, out);
    if (crit->parsed()) {
      crit_args.random_eta = eta_seed->count() > 0;
      return cmd_criteria(crit_args, out);
    }
    if (born->parsed()) return cmd_born_demo(born_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kInputError;
}

}  // namespace linpred::cli
