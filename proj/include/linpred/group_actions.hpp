#pragma once

#include <variant>
#include <vector>

#include "linpred/model_core.hpp"

namespace linpred {

/// gamma -> alpha * gamma, alpha > 0.
struct LinearScale {
  double alpha = 1.0;
};

/// A strictly monotone, continuous bijection of the real line, given by its
/// breakpoints and extended linearly past both ends.
class PiecewiseLinearMap {
 public:
  PiecewiseLinearMap(std::vector<double> x, std::vector<double> y);

  double operator()(double gamma) const;
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

using ScaleMap = std::variant<LinearScale, PiecewiseLinearMap>;

double apply_scale(const ScaleMap& map, double gamma);

/// Orthogonal rotation of the eigenvectors plus one scale map per eigen-
/// coordinate. An empty `scales` list means identity scales.
struct GroupElement {
  Matrix rotation;
  std::vector<ScaleMap> scales;
};

GroupElement identity_element(Index p);

/// Action on the full parameter: sigma_xx -> O sigma_xx O', and beta's
/// eigen-coordinates (taken on the adapted eigenbasis) mapped through the
/// scale maps onto the rotated eigenvectors. sigma2 is left unchanged.
FullParameter apply_K(const GroupElement& k, const FullParameter& phi, const ModelOptions& options = {});

/// d_j -> O d_j, gamma_j -> alpha_j gamma_j. Requires linear positive scales.
ReducedParameter apply_G(const GroupElement& g, const ReducedParameter& theta);

/// Number of multiplicity groups of sigma_xx carrying a nonzero share of beta.
int orbit_invariant_nonzero_count(const FullParameter& phi, const ModelOptions& options = {});

/// A G element carrying `from` onto `to` (same p and m). Sign differences are
/// absorbed into the rotation so all scales stay positive.
GroupElement connecting_element(const ReducedParameter& from, const ReducedParameter& to);

}  // namespace linpred
