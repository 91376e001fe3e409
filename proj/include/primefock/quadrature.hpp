#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace primefock {

template <typename Real>
struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

/// Gauss-Laguerre rule for the weight u^alpha e^{-u} on (0, inf) via Golub-Welsch.
/// Exact for polynomials of degree <= 2 order - 1.
template <typename Real = double>
QuadratureRule<Real> gauss_laguerre(unsigned order, Real alpha = Real(0)) {
  if (order == 0) throw std::invalid_argument("gauss_laguerre: order must be >= 1");
  if (!(alpha > Real(-1))) throw std::invalid_argument("gauss_laguerre: alpha must be > -1");
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(order);
  Mat J = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = Real(2 * i + 1) + alpha;
    if (i + 1 < n) {
      const Real b = std::sqrt(Real(i + 1) * (Real(i + 1) + alpha));
      J(i, i + 1) = b;
      J(i + 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gauss_laguerre: eigensolver failed");
  const Real mu0 = std::tgamma(alpha + Real(1));
  QuadratureRule<Real> rule;
  for (int i = 0; i < n; ++i) {
    const Real v0 = es.eigenvectors()(0, i);
    rule.nodes.push_back(es.eigenvalues()(i));
    rule.weights.push_back(mu0 * v0 * v0);
  }
  return rule;
}

}  // namespace primefock
