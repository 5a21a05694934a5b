#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bcw/errors.hpp"
#include "bcw/fock.hpp"
#include "bcw/gauss.hpp"
#include "bcw/noise.hpp"

// Exact truncated-space appliers for the attenuator E_{lambda,sigma_E} and
// the classical noise channel F_{t,f}, analytic moment propagation, and the
// coherent-ensemble Holevo rate.

namespace bcw::channels {

using fock::complexd;
using fock::DensityMatrix;

// Mass a named environment family may lose to the truncation when realized.
inline constexpr double family_tail_budget = 1e-3;
// Mass an explicitly supplied matrix may lose when cut to the operating dim.
inline constexpr double supplied_tail_budget = 1e-6;

/// Attenuator environment sigma_E: a named family or an explicit matrix.
/// Scalar summaries (N_E, S_E, N_E^ep) are always recomputed from the family
/// parameters, never user-supplied.
class EnvironmentSpec {
 public:
  enum class Kind { thermal, number, coherent, superposition, explicit_state };

  static EnvironmentSpec thermal(double N) {
    if (N < 0.0) throw std::domain_error("thermal environment: N_E < 0");
    EnvironmentSpec e;
    e.storage_ = Thermal{N};
    return e;
  }

  static EnvironmentSpec number(int n) {
    if (n < 0) throw std::domain_error("number-state environment: n < 0");
    EnvironmentSpec e;
    e.storage_ = Number{n};
    return e;
  }

  static EnvironmentSpec vacuum() { return number(0); }

  static EnvironmentSpec coherent(complexd alpha) {
    EnvironmentSpec e;
    e.storage_ = Coherent{alpha};
    return e;
  }

  /// Finite superposition of number states, coefficients normalized.
  static EnvironmentSpec superposition(Eigen::VectorXcd coeffs) {
    if (coeffs.size() == 0 || coeffs.norm() == 0.0)
      throw std::invalid_argument("superposition needs nonzero coefficients");
    coeffs.normalize();
    EnvironmentSpec e;
    e.storage_ = Superposition{std::move(coeffs)};
    return e;
  }

  static EnvironmentSpec explicit_state(DensityMatrix state) {
    if (state.modes != 1)
      throw std::invalid_argument("environment must be single-mode");
    fock::validate(state);
    EnvironmentSpec e;
    e.storage_ = Explicit{std::move(state)};
    return e;
  }

  Kind kind() const {
    return static_cast<Kind>(storage_.index());
  }

  /// N_E.
  double mean_photon() const {
    if (const auto* t = std::get_if<Thermal>(&storage_)) return t->N;
    if (const auto* n = std::get_if<Number>(&storage_)) return n->n;
    if (const auto* c = std::get_if<Coherent>(&storage_)) return std::norm(c->alpha);
    if (const auto* s = std::get_if<Superposition>(&storage_)) {
      double m = 0.0;
      for (int n = 0; n < s->coeffs.size(); ++n)
        m += n * std::norm(s->coeffs(n));
      return m;
    }
    return fock::mean_photon_number(std::get<Explicit>(storage_).state);
  }

  /// S(sigma_E) in nats.
  double entropy() const {
    if (const auto* t = std::get_if<Thermal>(&storage_))
      return gauss::g_function(t->N);
    if (std::holds_alternative<Explicit>(storage_))
      return fock::von_neumann_entropy(std::get<Explicit>(storage_).state);
    return 0.0;  // number, coherent and superposition states are pure
  }

  /// N_E^ep = g^{-1}(S_E).
  double entropy_photon() const { return gauss::g_inverse(entropy()); }

  /// Mass the ideal family loses when truncated at dim.
  double tail_mass(int dim) const {
    if (const auto* t = std::get_if<Thermal>(&storage_))
      return fock::thermal_tail_mass(t->N, dim);
    if (const auto* n = std::get_if<Number>(&storage_))
      return n->n < dim ? 0.0 : 1.0;
    if (const auto* c = std::get_if<Coherent>(&storage_))
      return fock::coherent_tail_mass(c->alpha, dim);
    if (const auto* s = std::get_if<Superposition>(&storage_)) {
      double tail = 0.0;
      for (int n = dim; n < s->coeffs.size(); ++n) tail += std::norm(s->coeffs(n));
      return tail;
    }
    const auto& st = std::get<Explicit>(storage_).state;
    if (st.dim <= dim) return 0.0;
    return 1.0 - st.entries.topLeftCorner(dim, dim).trace().real();
  }

  /// Instantiate sigma_E at the operating truncation.
  DensityMatrix realize(int dim) const {
    if (const auto* t = std::get_if<Thermal>(&storage_)) {
      if (fock::thermal_tail_mass(t->N, dim) > family_tail_budget)
        throw truncation_error("thermal environment tail exceeds budget at dim");
      return fock::make_thermal_state(t->N, dim);
    }
    if (const auto* n = std::get_if<Number>(&storage_)) {
      if (n->n >= dim)
        throw truncation_error("number-state environment outside truncation");
      return fock::make_number_state(n->n, dim);
    }
    if (const auto* c = std::get_if<Coherent>(&storage_))
      return fock::make_coherent_state(c->alpha, dim);
    if (const auto* s = std::get_if<Superposition>(&storage_)) {
      if (s->coeffs.size() > dim)
        throw truncation_error("superposition support outside truncation");
      Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
      psi.head(s->coeffs.size()) = s->coeffs;
      return {dim, 1, psi * psi.adjoint()};
    }
    return fock::resized(std::get<Explicit>(storage_).state, dim,
                         supplied_tail_budget);
  }

  /// Gaussification moments of sigma_E.
  gauss::GaussianMoments moments() const {
    gauss::GaussianMoments m;
    if (const auto* t = std::get_if<Thermal>(&storage_)) {
      m.cov = (t->N + 0.5) * Eigen::Matrix2d::Identity();
    } else if (const auto* n = std::get_if<Number>(&storage_)) {
      m.cov = (n->n + 0.5) * Eigen::Matrix2d::Identity();
    } else if (const auto* c = std::get_if<Coherent>(&storage_)) {
      m.mean << std::sqrt(2.0) * c->alpha.real(), std::sqrt(2.0) * c->alpha.imag();
      m.cov = 0.5 * Eigen::Matrix2d::Identity();
    } else if (const auto* s = std::get_if<Superposition>(&storage_)) {
      const int d = static_cast<int>(s->coeffs.size());
      DensityMatrix st{d, 1, s->coeffs * s->coeffs.adjoint()};
      m = gauss::extract_moments(st);
    } else {
      m = gauss::extract_moments(std::get<Explicit>(storage_).state);
    }
    return m;
  }

  // family parameter accessors for serialization
  double thermal_N() const { return std::get<Thermal>(storage_).N; }
  int number_n() const { return std::get<Number>(storage_).n; }
  complexd coherent_alpha() const { return std::get<Coherent>(storage_).alpha; }
  const Eigen::VectorXcd& superposition_coeffs() const {
    return std::get<Superposition>(storage_).coeffs;
  }
  const DensityMatrix& explicit_matrix() const {
    return std::get<Explicit>(storage_).state;
  }

 private:
  struct Thermal {
    double N;
  };
  struct Number {
    int n;
  };
  struct Coherent {
    complexd alpha;
  };
  struct Superposition {
    Eigen::VectorXcd coeffs;
  };
  struct Explicit {
    DensityMatrix state;
  };
  std::variant<Thermal, Number, Coherent, Superposition, Explicit> storage_;
};

struct AttenuatorSpec {
  double lambda = 1.0;
  EnvironmentSpec env = EnvironmentSpec::vacuum();
};

struct ClassicalNoiseSpec {
  double t = 1.0;
  NoiseDensity f = NoiseDensity::standard_gaussian();
};

using ChannelSpec = std::variant<AttenuatorSpec, ClassicalNoiseSpec>;

/// E_{lambda,sigma_E}(rho) at truncation dim. The input is zero-padded or,
/// if it must be cut down, may lose at most supplied_tail_budget of its trace.
inline DensityMatrix apply_attenuator(const DensityMatrix& rho, double lambda,
                                      const EnvironmentSpec& env, int dim) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("transmissivity outside [0,1]");
  const DensityMatrix sys = fock::resized(rho, dim, supplied_tail_budget);
  const DensityMatrix e = env.realize(dim);
  return fock::beamsplitter_reduced(sys, e, lambda);
}

/// F_{t,f}(rho): mass-weighted displacement average over the quadrature of f,
/// renormalized by the captured mass. Displacement amplitudes obey the
/// alpha(xi) = sqrt(pi t) (xi_1 + i xi_2) normalization, so a point mass at xi
/// adds pi t |xi|^2 photons; every node must satisfy |alpha|^2 <= dim/4.
inline DensityMatrix apply_classical_noise(const DensityMatrix& rho, double t,
                                           const NoiseDensity& f,
                                           const QuadratureSpec& quad = {}) {
  if (!(t > 0.0)) throw std::domain_error("noise parameter t must be > 0");
  if (rho.modes != 1)
    throw std::invalid_argument("classical noise channel expects one mode");
  const int dim = rho.dim;
  const auto nodes = f.nodes(quad);
  const fock::DisplacementFactory displace(dim);
  const double scale = std::sqrt(M_PI * t);

  fock::MatrixXcd acc = fock::MatrixXcd::Zero(dim, dim);
  double mass = 0.0;
  for (const auto& node : nodes) {
    const complexd alpha = scale * complexd(node.x, node.y);
    if (std::norm(alpha) > dim / 4.0)
      throw truncation_error("displaced amplitude exceeds dim/4 guard");
    const fock::MatrixXcd d = displace(alpha);
    acc.noalias() += node.w * (d * rho.entries * d.adjoint());
    mass += node.w;
  }
  acc /= mass;
  return {dim, 1, fock::detail::hermitized(acc)};
}

/// Exact first/second-moment propagation. Attenuator: affine beamsplitter
/// map with the environment's gaussification. Classical noise: mean shifted
/// by sqrt(2 pi t) mu_f, covariance increased by 2 pi t Cov(f); a centered f
/// adds pi t E(f) photons.
inline gauss::GaussianMoments output_moments(const ChannelSpec& spec,
                                             const gauss::GaussianMoments& in) {
  gauss::GaussianMoments out;
  if (const auto* att = std::get_if<AttenuatorSpec>(&spec)) {
    const auto env = att->env.moments();
    const double l = att->lambda;
    out.mean = std::sqrt(l) * in.mean + std::sqrt(1.0 - l) * env.mean;
    out.cov = l * in.cov + (1.0 - l) * env.cov;
    return out;
  }
  const auto& cn = std::get<ClassicalNoiseSpec>(spec);
  out.mean = in.mean + std::sqrt(2.0 * M_PI * cn.t) * cn.f.mean();
  out.cov = in.cov + 2.0 * M_PI * cn.t * cn.f.covariance();
  return out;
}

/// Mean photon number of a gaussification, (tr cov + |mean|^2 - 1)/2.
inline double moments_photon_number(const gauss::GaussianMoments& m) {
  return 0.5 * (m.cov.trace() + m.mean.squaredNorm() - 1.0);
}

/// Holevo rate of the Gaussian-modulated coherent ensemble with budget N:
/// chi = S(Phi(rho_th,N)) - S(Phi(|0><0|)). Displacement covariance of both
/// channel families collapses the ensemble integral onto the vacuum seed.
inline double holevo_coherent_rate(const ChannelSpec& spec, double N, int dim,
                                   const QuadratureSpec& quad = {}) {
  if (N < 0.0) throw std::domain_error("photon budget N < 0");
  if (fock::thermal_tail_mass(N, dim) > family_tail_budget)
    throw truncation_error("thermal seed tail exceeds budget at dim");
  const DensityMatrix seed_avg = fock::make_thermal_state(N, dim);
  const DensityMatrix seed_vac = fock::make_number_state(0, dim);
  double s_avg = 0.0, s_vac = 0.0;
  if (const auto* att = std::get_if<AttenuatorSpec>(&spec)) {
    s_avg = fock::von_neumann_entropy(
        apply_attenuator(seed_avg, att->lambda, att->env, dim));
    s_vac = fock::von_neumann_entropy(
        apply_attenuator(seed_vac, att->lambda, att->env, dim));
  } else {
    const auto& cn = std::get<ClassicalNoiseSpec>(spec);
    s_avg = fock::von_neumann_entropy(
        apply_classical_noise(seed_avg, cn.t, cn.f, quad));
    s_vac = fock::von_neumann_entropy(
        apply_classical_noise(seed_vac, cn.t, cn.f, quad));
  }
  return s_avg - s_vac;
}

}  // namespace bcw::channels
