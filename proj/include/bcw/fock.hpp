#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "bcw/errors.hpp"

// Truncated Fock-space states, operators and entropies: the exact-simulation
// substrate. Conventions: hbar = 1, vacuum quadrature variance 1/2,
// a^dag a = (Q^2 + P^2 - 1)/2, entropies in nats.

namespace bcw::fock {

using complexd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Density operator on a truncated Fock space, one or two modes.
/// For two modes the basis index is m*dim + n (first mode slow).
struct DensityMatrix {
  int dim = 0;    // Fock truncation per mode
  int modes = 1;  // 1 or 2
  MatrixXcd entries;

  int total_dim() const { return modes == 1 ? dim : dim * dim; }
};

struct UnitaryMatrix {
  int dim = 0;  // total dimension of the carrier space
  MatrixXcd entries;
};

namespace detail {

inline MatrixXcd hermitized(const MatrixXcd& m) {
  return 0.5 * (m + m.adjoint());
}

// uniform double in (0, 1], fully determined by the mt19937_64 stream
inline double uniform01(std::mt19937_64& gen) {
  return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller; avoids std::normal_distribution, whose stream is
// implementation-defined
inline std::pair<double, double> normal_pair(std::mt19937_64& gen) {
  const double u1 = uniform01(gen);
  const double u2 = uniform01(gen);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
}

}  // namespace detail

inline double trace_real(const MatrixXcd& m) { return m.trace().real(); }

/// Checks hermiticity (1e-12 max-entry), unit trace (1e-10) and spectrum
/// (min eigenvalue >= -1e-10). Throws unphysical_error on violation.
inline void validate(const DensityMatrix& rho) {
  const MatrixXcd& m = rho.entries;
  if (m.rows() != rho.total_dim() || m.cols() != rho.total_dim())
    throw unphysical_error("density matrix storage does not match dim/modes");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw unphysical_error("density matrix is not hermitian within 1e-12");
  if (std::abs(trace_real(m) - 1.0) > 1e-10)
    throw unphysical_error("density matrix trace deviates from 1 beyond 1e-10");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(detail::hermitized(m),
                                              Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw unphysical_error("density matrix has eigenvalue below -1e-10");
}

inline bool is_physical(const DensityMatrix& rho) {
  try {
    validate(rho);
    return true;
  } catch (const unphysical_error&) {
    return false;
  }
}

/// Fock basis projector |n><n|.
inline DensityMatrix make_number_state(int n, int dim) {
  if (n < 0 || n >= dim)
    throw std::out_of_range("number state index outside truncation");
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  m(n, n) = 1.0;
  return {dim, 1, std::move(m)};
}

/// Mass of the ideal coherent state |alpha> beyond the truncation.
inline double coherent_tail_mass(complexd alpha, int dim) {
  const double mu = std::norm(alpha);
  double term = std::exp(-mu);  // Poisson(0)
  double cum = 0.0;
  for (int n = 0; n < dim; ++n) {
    cum += term;
    term *= mu / (n + 1);
  }
  return std::max(0.0, 1.0 - cum);
}

/// Truncated coherent state, amplitudes ~ alpha^n/sqrt(n!), renormalized.
/// Requires |alpha|^2 <= dim/4.
inline DensityMatrix make_coherent_state(complexd alpha, int dim) {
  if (dim < 1) throw std::domain_error("dim must be positive");
  if (std::norm(alpha) > dim / 4.0)
    throw truncation_error("coherent amplitude exceeds dim/4 guard");
  VectorXcd psi(dim);
  psi(0) = 1.0;
  for (int n = 1; n < dim; ++n) psi(n) = psi(n - 1) * alpha / std::sqrt(double(n));
  psi.normalize();
  return {dim, 1, psi * psi.adjoint()};
}

/// Mass of the ideal thermal state beyond the truncation: (N/(N+1))^dim.
inline double thermal_tail_mass(double N, int dim) {
  if (N <= 0.0) return 0.0;
  return std::pow(N / (N + 1.0), dim);
}

/// Truncated thermal state with geometric weights, renormalized.
inline DensityMatrix make_thermal_state(double N, int dim) {
  if (N < 0.0) throw std::domain_error("thermal mean photon number < 0");
  if (dim < 1) throw std::domain_error("dim must be positive");
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  const double q = N / (N + 1.0);
  double w = 1.0;
  double norm = 0.0;
  for (int n = 0; n < dim; ++n) {
    m(n, n) = w;
    norm += w;
    w *= q;
  }
  m /= norm;
  return {dim, 1, std::move(m)};
}

/// Annihilation operator a on the truncated space.
inline MatrixXcd annihilation_matrix(int dim) {
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

namespace detail {

inline void reunitarize_if_needed(MatrixXcd& u) {
  const double drift =
      (u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (drift > 1e-10) {
    Eigen::JacobiSVD<MatrixXcd> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
  }
}

}  // namespace detail

/// Caches the eigendecomposition of a^dag - a so that displacements
/// D(alpha) = P_phi V e^{-i r Lambda} V^dag P_phi^dag cost two matrix
/// products per amplitude. Used by the classical-noise quadrature loop.
class DisplacementFactory {
 public:
  explicit DisplacementFactory(int dim) : dim_(dim) {
    MatrixXcd a = annihilation_matrix(dim);
    // i(a^dag - a) is hermitian
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(complexd(0, 1) *
                                                (a.adjoint() - a));
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
  }

  int dim() const { return dim_; }

  MatrixXcd operator()(complexd alpha) const {
    const double r = std::abs(alpha);
    const double phi = std::arg(alpha);
    // exp(r(a^dag - a)) = V exp(-i r Lambda) V^dag
    VectorXcd phase(dim_);
    for (int k = 0; k < dim_; ++k)
      phase(k) = std::exp(complexd(0, -r * values_(k)));
    MatrixXcd d = vectors_ * phase.asDiagonal() * vectors_.adjoint();
    if (phi != 0.0) {
      VectorXcd rot(dim_);
      for (int n = 0; n < dim_; ++n) rot(n) = std::exp(complexd(0, n * phi));
      d = rot.asDiagonal() * d * rot.conjugate().asDiagonal();
    }
    return d;
  }

 private:
  int dim_;
  MatrixXcd vectors_;
  VectorXd values_;
};

/// Weyl displacement D(alpha) = exp(alpha a^dag - alpha* a) on the truncated
/// space. Requires |alpha|^2 <= dim/4.
inline UnitaryMatrix displacement_operator(complexd alpha, int dim) {
  if (std::norm(alpha) > dim / 4.0)
    throw truncation_error("displacement amplitude exceeds dim/4 guard");
  MatrixXcd d = DisplacementFactory(dim)(alpha);
  detail::reunitarize_if_needed(d);
  return {dim, std::move(d)};
}

/// Unitary blocks of exp(theta (a^dag b - a b^dag)), cos theta = sqrt(lambda),
/// one block per total-photon sector M = 0 .. 2(dim-1). Block M acts on the
/// basis |m, M-m> with m in [max(0, M-dim+1), min(M, dim-1)].
inline std::vector<MatrixXcd> beamsplitter_sectors(double lambda, int dim) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("transmissivity outside [0,1]");
  const double theta = std::acos(std::clamp(std::sqrt(lambda), 0.0, 1.0));
  std::vector<MatrixXcd> blocks;
  blocks.reserve(2 * dim - 1);
  for (int M = 0; M <= 2 * (dim - 1); ++M) {
    const int m_lo = std::max(0, M - (dim - 1));
    const int m_hi = std::min(M, dim - 1);
    const int s = m_hi - m_lo + 1;
    if (theta == 0.0) {
      blocks.push_back(MatrixXcd::Identity(s, s));
      continue;
    }
    MatrixXcd k = MatrixXcd::Zero(s, s);
    for (int j = 0; j + 1 < s; ++j) {
      const int m = m_lo + j;
      const double c = std::sqrt(double(m + 1) * double(M - m));
      k(j + 1, j) = c;
      k(j, j + 1) = -c;
    }
    // K antisymmetric: exp(theta K) = V e^{-i theta D} V^dag with iK = V D V^dag
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(complexd(0, 1) * k);
    VectorXcd phase(s);
    for (int j = 0; j < s; ++j)
      phase(j) = std::exp(complexd(0, -theta * es.eigenvalues()(j)));
    blocks.push_back(es.eigenvectors() * phase.asDiagonal() *
                     es.eigenvectors().adjoint());
  }
  return blocks;
}

/// Full two-mode beamsplitter unitary on dimension dim^2, block diagonal in
/// total photon number. Intended for small dims; the channel applier works
/// sector-by-sector instead.
inline UnitaryMatrix beamsplitter_unitary(double lambda, int dim) {
  auto blocks = beamsplitter_sectors(lambda, dim);
  const int d2 = dim * dim;
  MatrixXcd u = MatrixXcd::Zero(d2, d2);
  for (int M = 0; M <= 2 * (dim - 1); ++M) {
    const int m_lo = std::max(0, M - (dim - 1));
    const MatrixXcd& b = blocks[M];
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) {
        const int mi = m_lo + i, mj = m_lo + j;
        u(mi * dim + (M - mi), mj * dim + (M - mj)) = b(i, j);
      }
  }
  return {d2, std::move(u)};
}

/// rho (x) sigma as a two-mode state.
inline DensityMatrix tensor_product(const DensityMatrix& rho,
                                    const DensityMatrix& sigma) {
  if (rho.modes != 1 || sigma.modes != 1)
    throw std::invalid_argument("tensor_product expects single-mode factors");
  if (rho.dim != sigma.dim)
    throw std::invalid_argument("tensor_product expects equal truncations");
  const int d = rho.dim;
  MatrixXcd out(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out.block(i * d, j * d, d, d) = rho.entries(i, j) * sigma.entries;
  return {d, 2, std::move(out)};
}

/// Reduce a two-mode state to one mode; keep = 0 keeps the first mode.
inline DensityMatrix partial_trace(const DensityMatrix& rho, int keep) {
  if (rho.modes != 2)
    throw std::invalid_argument("partial_trace expects a two-mode state");
  if (keep != 0 && keep != 1)
    throw std::invalid_argument("keep must be 0 or 1");
  const int d = rho.dim;
  MatrixXcd out = MatrixXcd::Zero(d, d);
  if (keep == 0) {
    for (int m = 0; m < d; ++m)
      for (int mp = 0; mp < d; ++mp)
        for (int k = 0; k < d; ++k) out(m, mp) += rho.entries(m * d + k, mp * d + k);
  } else {
    for (int n = 0; n < d; ++n)
      for (int np = 0; np < d; ++np)
        for (int k = 0; k < d; ++k) out(n, np) += rho.entries(k * d + n, k * d + np);
  }
  return {d, 1, std::move(out)};
}

inline DensityMatrix apply_unitary(const UnitaryMatrix& u,
                                   const DensityMatrix& rho) {
  if (u.dim != rho.total_dim())
    throw std::invalid_argument("unitary/state dimension mismatch");
  return {rho.dim, rho.modes,
          detail::hermitized(u.entries * rho.entries * u.entries.adjoint())};
}

/// -sum lambda_i ln lambda_i in nats. Eigenvalues below 1e-14 of the trace are
/// treated as zero; negatives above -1e-10 are clipped, below that is an error.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(detail::hermitized(rho.entries),
                                              Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  const double clip = 1e-14 * std::abs(trace_real(rho.entries));
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev < -1e-10)
      throw unphysical_error("eigenvalue below -1e-10 in entropy");
    if (ev <= clip) continue;
    s -= ev * std::log(ev);
  }
  return std::max(s, 0.0);
}

/// tr(n_hat rho); for two modes the per-mode numbers are summed.
inline double mean_photon_number(const DensityMatrix& rho) {
  double total = 0.0;
  if (rho.modes == 1) {
    for (int n = 0; n < rho.dim; ++n) total += n * rho.entries(n, n).real();
  } else {
    for (int m = 0; m < rho.dim; ++m)
      for (int n = 0; n < rho.dim; ++n)
        total += (m + n) * rho.entries(m * rho.dim + n, m * rho.dim + n).real();
  }
  return total;
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.total_dim() != b.total_dim())
    throw std::invalid_argument("trace_distance dimension mismatch");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(
      detail::hermitized(a.entries - b.entries), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Re-truncate or zero-pad a single-mode state. Truncation that would discard
/// more than max_discard of the trace is an error; kept mass is renormalized.
inline DensityMatrix resized(const DensityMatrix& rho, int dim,
                             double max_discard = 1e-6) {
  if (rho.modes != 1)
    throw std::invalid_argument("resized expects a single-mode state");
  if (dim == rho.dim) return rho;
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  if (dim > rho.dim) {
    out.topLeftCorner(rho.dim, rho.dim) = rho.entries;
    return {dim, 1, std::move(out)};
  }
  const double kept = rho.entries.topLeftCorner(dim, dim).trace().real();
  if (1.0 - kept > max_discard)
    throw truncation_error("resizing would discard more than the tail budget");
  out = rho.entries.topLeftCorner(dim, dim) / kept;
  return {dim, 1, std::move(out)};
}

/// tr_E( U_lambda (rho (x) sigma) U_lambda^dag ) computed sector-by-sector;
/// never materializes the two-mode matrix.
inline DensityMatrix beamsplitter_reduced(const DensityMatrix& rho,
                                          const DensityMatrix& sigma,
                                          double lambda) {
  if (rho.modes != 1 || sigma.modes != 1)
    throw std::invalid_argument("beamsplitter_reduced expects single-mode states");
  if (rho.dim != sigma.dim)
    throw std::invalid_argument("beamsplitter_reduced expects equal truncations");
  const int d = rho.dim;
  const auto blocks = beamsplitter_sectors(lambda, d);
  const int n_sectors = 2 * (d - 1) + 1;

  MatrixXcd out = MatrixXcd::Zero(d, d);
  MatrixXcd a, b;
  for (int M1 = 0; M1 < n_sectors; ++M1) {
    const int lo1 = std::max(0, M1 - (d - 1));
    const int s1 = std::min(M1, d - 1) - lo1 + 1;
    for (int M2 = 0; M2 < n_sectors; ++M2) {
      const int lo2 = std::max(0, M2 - (d - 1));
      const int s2 = std::min(M2, d - 1) - lo2 + 1;
      const int k_lo = std::max({0, M1 - (d - 1), M2 - (d - 1)});
      const int k_hi = std::min({M1, M2, d - 1});
      if (k_lo > k_hi) continue;

      a.resize(s1, s2);
      for (int i = 0; i < s1; ++i) {
        const int m1 = lo1 + i;
        for (int j = 0; j < s2; ++j) {
          const int m2 = lo2 + j;
          a(i, j) = rho.entries(m1, m2) * sigma.entries(M1 - m1, M2 - m2);
        }
      }
      b.noalias() = blocks[M1] * a * blocks[M2].adjoint();
      for (int k = k_lo; k <= k_hi; ++k)
        out(M1 - k, M2 - k) += b((M1 - k) - lo1, (M2 - k) - lo2);
    }
  }
  return {d, 1, detail::hermitized(out)};
}

/// Seeded random density matrix: complex Ginibre G, rho = GG^dag normalized,
/// then a geometric diagonal envelope damps high Fock components until the
/// mean photon number is at most photon_cap (rejection-free).
inline DensityMatrix random_density_matrix(int dim, double photon_cap,
                                           std::uint64_t seed) {
  if (photon_cap < 0.0) throw std::domain_error("photon cap < 0");
  if (photon_cap == 0.0) return make_number_state(0, dim);
  std::mt19937_64 gen(seed);
  MatrixXcd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto [x, y] = detail::normal_pair(gen);
      g(i, j) = complexd(x, y);
    }
  MatrixXcd rho = g * g.adjoint();
  rho /= trace_real(rho);

  auto damped = [&](double q) {
    VectorXd env(dim);
    double w = 1.0;
    for (int n = 0; n < dim; ++n) {
      env(n) = w;
      w *= std::sqrt(q);
    }
    MatrixXcd m = env.asDiagonal() * rho * env.asDiagonal();
    m /= trace_real(m);
    return m;
  };
  auto mean_of = [&](const MatrixXcd& m) {
    double t = 0.0;
    for (int n = 0; n < dim; ++n) t += n * m(n, n).real();
    return t;
  };

  if (mean_of(rho) <= photon_cap) return {dim, 1, detail::hermitized(rho)};
  double q_lo = 0.0, q_hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double q = 0.5 * (q_lo + q_hi);
    if (mean_of(damped(q)) <= photon_cap)
      q_lo = q;
    else
      q_hi = q;
  }
  return {dim, 1, detail::hermitized(damped(q_lo))};
}

}  // namespace bcw::fock
