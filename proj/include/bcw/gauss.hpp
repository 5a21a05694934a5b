#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "bcw/errors.hpp"
#include "bcw/fock.hpp"

// The g function, its inverse, gaussification moments and Gaussian-state
// entropy: the analytic backbone of every capacity bound.

namespace bcw::gauss {

/// Entropy in nats of a thermal state with mean photon number N:
/// g(N) = (N+1) ln(N+1) - N ln N, g(0) = 0.
inline double g_function(double N) {
  if (N < 0.0) throw std::domain_error("g_function: N < 0");
  if (N == 0.0) return 0.0;
  return (N + 1.0) * std::log1p(N) - N * std::log(N);
}

/// Unique N >= 0 with g(N) = s. Bracketed bisection on [0, e^s]
/// (g(N) >= ln(N+1)) followed by Newton, derivative g'(N) = ln((N+1)/N).
inline double g_inverse(double s) {
  if (s < 0.0) throw std::domain_error("g_inverse: s < 0");
  if (s == 0.0) return 0.0;
  double lo = 0.0, hi = std::exp(s);
  double x = 0.5 * hi;
  for (int it = 0; it < 60; ++it) {
    x = 0.5 * (lo + hi);
    if (g_function(x) < s)
      lo = x;
    else
      hi = x;
  }
  x = 0.5 * (lo + hi);
  for (int it = 0; it < 140; ++it) {
    const double f = g_function(x) - s;
    const double fp = std::log1p(1.0 / x);
    const double step = f / fp;
    double next = x - step;
    if (next <= lo || next >= hi) next = 0.5 * (lo + hi);  // keep the bracket
    if (g_function(next) < s)
      lo = next;
    else
      hi = next;
    if (std::abs(next - x) <= 1e-15 * (1.0 + std::abs(next))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

/// First moments and quadrature covariance of a state's gaussification.
/// Vacuum has cov = I/2; a physical covariance has nu = sqrt(det cov) >= 1/2.
struct GaussianMoments {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = 0.5 * Eigen::Matrix2d::Identity();

  double symplectic_eigenvalue() const {
    const double det = cov.determinant();
    if (det < 0.0 && det > -1e-14) return 0.0;
    return std::sqrt(det);
  }
};

/// Moments of [rho] from ladder-operator expectations; exact on the truncated
/// space (<a>, <a^2>, <a^dag a> never reach past the truncation).
inline GaussianMoments extract_moments(const fock::DensityMatrix& rho) {
  if (rho.modes != 1)
    throw std::invalid_argument("extract_moments expects a single-mode state");
  const int d = rho.dim;
  std::complex<double> a_mean = 0.0, a2_mean = 0.0;
  double n_mean = 0.0;
  for (int n = 0; n < d; ++n) {
    if (n + 1 < d) a_mean += std::sqrt(double(n + 1)) * rho.entries(n + 1, n);
    if (n + 2 < d)
      a2_mean += std::sqrt(double((n + 1) * (n + 2))) * rho.entries(n + 2, n);
    n_mean += n * rho.entries(n, n).real();
  }
  GaussianMoments m;
  // Q = (a + a^dag)/sqrt(2), P = (a - a^dag)/(i sqrt(2)):
  // <Q^2> = 1/2 + <n> + Re<a^2>, <P^2> = 1/2 + <n> - Re<a^2>,
  // <{Q,P}>/2 = Im<a^2>
  m.mean(0) = std::sqrt(2.0) * a_mean.real();
  m.mean(1) = std::sqrt(2.0) * a_mean.imag();
  const double qq = 0.5 + n_mean + a2_mean.real();
  const double pp = 0.5 + n_mean - a2_mean.real();
  const double qp = a2_mean.imag();
  m.cov(0, 0) = qq - m.mean(0) * m.mean(0);
  m.cov(1, 1) = pp - m.mean(1) * m.mean(1);
  m.cov(0, 1) = m.cov(1, 0) = qp - m.mean(0) * m.mean(1);
  return m;
}

/// Entropy of the Gaussian state with the given moments: g(nu - 1/2) with
/// nu = sqrt(det cov). Throws unphysical_error if nu < 1/2 - 1e-10.
inline double gaussified_entropy(const GaussianMoments& m) {
  const double nu = m.symplectic_eigenvalue();
  if (nu < 0.5 - 1e-10)
    throw unphysical_error("symplectic eigenvalue below 1/2");
  return g_function(std::max(0.0, nu - 0.5));
}

/// Mean photon number of the thermal state with the same entropy as rho.
inline double entropy_photon_number(const fock::DensityMatrix& rho) {
  return g_inverse(fock::von_neumann_entropy(rho));
}

}  // namespace bcw::gauss
