// Reference computations for the test suites. Everything here is written
// against Eigen and <random> directly so that it shares no code path with the
// library under test.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

inline Vec normal_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Mat random_orthogonal(Rng& rng, Eigen::Index p) {
  Mat g(p, p);
  for (Eigen::Index j = 0; j < p; ++j) g.col(j) = normal_vector(rng, p);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

/// Eigenvalues drawn on a log scale with a minimum relative gap, so planted
/// eigenspaces stay numerically distinct.
inline Vec spread_eigenvalues(Rng& rng, Eigen::Index p, double lo = 0.2, double hi = 10.0, double min_ratio = 1.08) {
  for (;;) {
    std::vector<double> v(static_cast<std::size_t>(p));
    for (auto& x : v) x = std::exp(uniform(rng, std::log(lo), std::log(hi)));
    std::sort(v.begin(), v.end(), std::greater<>());
    bool ok = true;
    for (std::size_t i = 1; i < v.size(); ++i) ok = ok && v[i - 1] / v[i] >= min_ratio;
    if (ok) return Eigen::Map<Vec>(v.data(), p);
  }
}

inline Mat random_spd(Rng& rng, Eigen::Index p) {
  const Mat q = random_orthogonal(rng, p);
  Vec lambda(p);
  for (Eigen::Index i = 0; i < p; ++i) lambda(i) = uniform(rng, 0.1, 5.0);
  Mat s = q * lambda.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

/// Numerical rank from singular values, relative to the largest.
inline int svd_rank(const Mat& a, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

inline Mat raw_krylov(const Mat& sigma, const Vec& s, int a) {
  Mat k(s.size(), a);
  Vec v = s;
  for (int j = 0; j < a; ++j) {
    k.col(j) = v;
    v = sigma * v;
  }
  return k;
}

/// Number of eigenvalue clusters (within rel_tol) carrying a projection of s
/// above zero_tol * ||s||.
inline int eigenspace_count(const Mat& sigma, const Vec& s, double cluster_tol = 1e-9, double zero_tol = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Mat> es(sigma);
  const Vec lam = es.eigenvalues();
  const Mat u = es.eigenvectors();
  const double top = lam.cwiseAbs().maxCoeff();
  int count = 0;
  Eigen::Index i = 0;
  while (i < lam.size()) {
    Eigen::Index j = i + 1;
    while (j < lam.size() && std::abs(lam(j) - lam(i)) <= cluster_tol * top) ++j;
    const Vec proj = u.middleCols(i, j - i).transpose() * s;
    if (proj.norm() > zero_tol * s.norm()) ++count;
    i = j;
  }
  return count;
}

/// sigma-projection of beta on span(K): normal equations on a Householder
/// orthonormal basis of the column-scaled block.
inline Vec sigma_projection(const Mat& sigma, const Mat& k, const Vec& beta) {
  Mat scaled = k;
  for (Eigen::Index j = 0; j < k.cols(); ++j) scaled.col(j).normalize();
  Eigen::HouseholderQR<Mat> qr(scaled);
  const Mat q = qr.householderQ() * Mat::Identity(k.rows(), k.cols());
  const Mat gram = q.transpose() * sigma * q;
  const Vec rhs = q.transpose() * sigma * beta;
  return q * gram.fullPivLu().solve(rhs);
}

inline Vec ols(const Mat& x, const Vec& y) {
  const Vec xm = x.colwise().mean();
  const Mat xc = x.rowwise() - xm.transpose();
  const Vec yc = y.array() - y.mean();
  return (xc.transpose() * xc).fullPivLu().solve(xc.transpose() * yc);
}

/// Re sum_i sum_k p_i |<u_i, v_k>|^2 xi(theta_k) for rho = sum p_i u_i u_i^H
/// and A = sum theta_k v_k v_k^H.
template <class Xi>
double born_double_sum(const Vec& p, const Eigen::MatrixXcd& u, const Vec& theta, const Eigen::MatrixXcd& v, Xi xi) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    for (Eigen::Index k = 0; k < theta.size(); ++k) total += p(i) * std::norm(u.col(i).dot(v.col(k))) * xi(theta(k));
  return total;
}

inline Eigen::MatrixXcd random_unitary(Rng& rng, Eigen::Index r) {
  Eigen::MatrixXcd g(r, r);
  std::normal_distribution<double> nd;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < r; ++j) g(i, j) = {nd(rng), nd(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(r, r);
}

}  // namespace oracle

namespace oracle {

struct Planted {
  Mat sigma;
  Vec beta;
  Vec sigma_xy;
  Mat q;       // eigenvectors, columns
  Vec lambda;  // descending
  std::vector<int> support;
};

/// Sigma = Q diag(lambda) Q' with beta carried by m randomly chosen eigenvectors.
inline Planted planted(Rng& rng, Eigen::Index p, int m) {
  Planted out;
  out.lambda = spread_eigenvalues(rng, p);
  out.q = random_orthogonal(rng, p);
  Mat s = out.q * out.lambda.asDiagonal() * out.q.transpose();
  out.sigma = 0.5 * (s + s.transpose());
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  out.support.assign(idx.begin(), idx.begin() + m);
  std::sort(out.support.begin(), out.support.end());
  out.beta = Vec::Zero(p);
  for (int j : out.support) {
    const double g = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.5, 2.0);
    out.beta += g * out.q.col(j);
  }
  out.sigma_xy = out.sigma * out.beta;
  return out;
}

}  // namespace oracle
