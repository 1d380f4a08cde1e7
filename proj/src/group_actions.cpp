#include "linpred/group_actions.hpp"

#include <algorithm>
#include <cmath>

#include "linpred/error.hpp"

namespace linpred {

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() < 2 || x_.size() != y_.size()) {
    throw Error(ErrorCode::InvalidGroupElement, "piecewise-linear map needs >= 2 matching breakpoints");
  }
  bool increasing = true;
  bool decreasing = true;
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::InvalidGroupElement, "breakpoints must be strictly increasing");
    increasing = increasing && y_[i] > y_[i - 1];
    decreasing = decreasing && y_[i] < y_[i - 1];
  }
  if (!increasing && !decreasing) throw Error(ErrorCode::InvalidGroupElement, "map is not strictly monotone");
  for (double v : x_) if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGroupElement, "non-finite breakpoint");
  for (double v : y_) if (!std::isfinite(v)) throw Error(ErrorCode::InvalidGroupElement, "non-finite breakpoint");
}

double PiecewiseLinearMap::operator()(double gamma) const {
  std::size_t seg;
  if (gamma <= x_.front()) {
    seg = 0;
  } else if (gamma >= x_.back()) {
    seg = x_.size() - 2;
  } else {
    seg = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), gamma) - x_.begin()) - 1;
  }
  const double slope = (y_[seg + 1] - y_[seg]) / (x_[seg + 1] - x_[seg]);
  return y_[seg] + slope * (gamma - x_[seg]);
}

double apply_scale(const ScaleMap& map, double gamma) {
  return std::visit(
      [gamma](const auto& m) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LinearScale>) {
          return m.alpha * gamma;
        } else {
          return m(gamma);
        }
      },
      map);
}

GroupElement identity_element(Index p) { return GroupElement{Matrix::Identity(p, p), {}}; }

namespace {

void validate_rotation(const Matrix& o, Index p) {
  if (o.rows() != p || o.cols() != p) throw Error(ErrorCode::InvalidGroupElement, "rotation must be p x p");
  if (!o.allFinite() || (o.transpose() * o - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::InvalidGroupElement, "rotation is not orthogonal");
  }
}

void validate_scales(const std::vector<ScaleMap>& scales, std::size_t expected, bool linear_only) {
  if (scales.empty()) return;
  if (scales.size() != expected) throw Error(ErrorCode::InvalidGroupElement, "wrong number of scale maps");
  for (const auto& s : scales) {
    if (const auto* lin = std::get_if<LinearScale>(&s)) {
      if (!(lin->alpha > 0.0) || !std::isfinite(lin->alpha)) {
        throw Error(ErrorCode::InvalidGroupElement, "linear scale must be positive");
      }
    } else if (linear_only) {
      throw Error(ErrorCode::InvalidGroupElement, "group G admits linear scales only");
    }
  }
}

}  // namespace

FullParameter apply_K(const GroupElement& k, const FullParameter& phi, const ModelOptions& options) {
  const Index p = phi.p();
  validate_rotation(k.rotation, p);
  validate_scales(k.scales, static_cast<std::size_t>(p), false);

  const SpectralDecomposition basis = adapted_eigenbasis(phi, options);
  const Vector coords = basis.eigenvectors.transpose() * phi.beta();
  const Matrix rotated = k.rotation * basis.eigenvectors;

  Vector new_beta = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    const double g = k.scales.empty() ? coords(j) : apply_scale(k.scales[static_cast<std::size_t>(j)], coords(j));
    new_beta += g * rotated.col(j);
  }
  Matrix new_sigma = k.rotation * phi.sigma_xx() * k.rotation.transpose();
  new_sigma = 0.5 * (new_sigma + new_sigma.transpose()).eval();
  Vector new_sigma_xy = new_sigma * new_beta;
  return FullParameter(std::move(new_sigma), std::move(new_sigma_xy), phi.sigma2());
}

ReducedParameter apply_G(const GroupElement& g, const ReducedParameter& theta) {
  validate_rotation(g.rotation, theta.p());
  validate_scales(g.scales, static_cast<std::size_t>(theta.m()), true);
  std::vector<ReducedComponent> out;
  out.reserve(theta.components().size());
  for (std::size_t j = 0; j < theta.components().size(); ++j) {
    const auto& c = theta.components()[j];
    const double alpha = g.scales.empty() ? 1.0 : std::get<LinearScale>(g.scales[j]).alpha;
    out.push_back({alpha * c.gamma, g.rotation * c.direction, c.eigenvalue});
  }
  return ReducedParameter(theta.p(), std::move(out), 0.0);
}

int orbit_invariant_nonzero_count(const FullParameter& phi, const ModelOptions& options) {
  const SpectralDecomposition basis = spectral_decomposition(phi.sigma_xx(), options.multiplicity_tol);
  const Vector coords = basis.eigenvectors.transpose() * phi.beta();
  const double cutoff = options.zero_tol * phi.beta().norm();
  int count = 0;
  for (const auto& group : basis.multiplicity_groups) {
    double sq = 0.0;
    for (Index j : group) sq += coords(j) * coords(j);
    if (std::sqrt(sq) > cutoff) ++count;
  }
  return count;
}

GroupElement connecting_element(const ReducedParameter& from, const ReducedParameter& to) {
  if (from.p() != to.p() || from.m() != to.m()) {
    throw Error(ErrorCode::DimensionMismatch, "reductions differ in p or m");
  }
  const Index p = from.p();
  const Index m = from.m();
  Matrix src(p, m);
  Matrix dst(p, m);
  std::vector<ScaleMap> scales;
  scales.reserve(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    const auto& a = from.components()[static_cast<std::size_t>(j)];
    const auto& b = to.components()[static_cast<std::size_t>(j)];
    const double ratio = b.gamma / a.gamma;
    src.col(j) = a.direction;
    dst.col(j) = ratio < 0.0 ? Vector(-b.direction) : b.direction;
    scales.emplace_back(LinearScale{std::abs(ratio)});
  }
  const Matrix src_full = complete_orthonormal_basis(src);
  const Matrix dst_full = complete_orthonormal_basis(dst);
  return GroupElement{dst_full * src_full.transpose(), std::move(scales)};
}

}  // namespace linpred
