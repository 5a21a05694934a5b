#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bcw::quad {

struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix,
// weights are mu0 * (first eigenvector component)^2.
inline Rule1D golub_welsch(const Eigen::VectorXd& off_diag, double mu0) {
  const int n = static_cast<int>(off_diag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diag(k);
    jacobi(k + 1, k) = off_diag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Rule1D rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    rule.weights(k) = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1].
inline Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("quadrature order must be positive");
  Eigen::VectorXd b(std::max(0, n - 1));
  for (int k = 1; k < n; ++k) b(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return detail::golub_welsch(b, 2.0);
}

/// n-point Gauss-Hermite rule for weight e^{-x^2} on the real line.
inline Rule1D gauss_hermite(int n) {
  if (n < 1) throw std::domain_error("quadrature order must be positive");
  Eigen::VectorXd b(std::max(0, n - 1));
  for (int k = 1; k < n; ++k) b(k - 1) = std::sqrt(0.5 * k);
  return detail::golub_welsch(b, std::sqrt(M_PI));
}

/// Phase-space quadrature node: position (x, y) and probability mass w,
/// so that  integral f(xi) h(xi) d^2 xi  ~=  sum_k w_k h(x_k, y_k).
struct Node2D {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
};

}  // namespace bcw::quad
