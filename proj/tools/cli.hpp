#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "linpred/estimators.hpp"
#include "linpred/simulation.hpp"

namespace linpred::cli {

/// Exit status contract shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalPrecondition = 3,
  kExperimentPolicy = 4,
};

struct ExperimentConfig {
  DesignSpec design;
  /// "ridge:grid" entries are already expanded.
  std::vector<EstimatorSpec> estimators;
  int replicates = 0;
  std::vector<std::string> criteria;
  int empirical_test_size = 0;
  std::string csv_name = "results.csv";
  std::string json_name = "results.json";
};

/// Parses an experiment file. "ridge:grid" expands to the default ridge grid
/// scaled by trace(sigma_xx)/p of the design's population.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

int exit_code_for(const std::exception& e);

/// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linpred::cli
