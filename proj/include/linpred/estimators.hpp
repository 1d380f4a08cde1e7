#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "linpred/sample_pls.hpp"

namespace linpred {

/// A competitor estimator: "ols", "ridge:<k>", "pcr:<c>" or "pls:<a>".
struct EstimatorSpec {
  enum class Kind { Ols, Ridge, Pcr, Pls };

  Kind kind = Kind::Ols;
  double ridge_k = 0.0;
  int components = 0;

  static EstimatorSpec ols() { return {Kind::Ols, 0.0, 0}; }
  static EstimatorSpec ridge(double k) { return {Kind::Ridge, k, 0}; }
  static EstimatorSpec pcr(int c) { return {Kind::Pcr, 0.0, c}; }
  static EstimatorSpec pls(int a) { return {Kind::Pls, 0.0, a}; }

  static EstimatorSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

struct LinearFit {
  Vector beta;
  Vector x_mean;
  double y_mean = 0.0;
  std::optional<PlsFit> pls;  // set for the pls kind

  double predict(const Vector& x_new) const { return y_mean + beta.dot(x_new - x_mean); }
};

/// Throws SingularDesign (ols, or ridge with k = 0) or RankDeficientKrylov (pls).
LinearFit fit(const EstimatorSpec& spec, const Dataset& data, const PlsOptions& pls_options = {});

/// Ridge penalties {0.001, 0.01, 0.1, 1, 10} times `scale` (typically trace(S_xx)/p).
std::vector<EstimatorSpec> default_ridge_grid(double scale);

}  // namespace linpred
