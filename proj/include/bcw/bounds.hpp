#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bcw/channels.hpp"
#include "bcw/errors.hpp"
#include "bcw/gauss.hpp"

// Closed-form capacity bounds: the EPI pair, the EPNI-conditional pair,
// Gaussian special cases, the classical additive-noise bounds and the
// N-independent gap bounds.

namespace bcw::bounds {

using gauss::g_function;
using gauss::g_inverse;

enum class Method { epi, epni };

inline const char* method_name(Method m) {
  return m == Method::epi ? "epi" : "epni";
}

/// Scalar summary of the channel a report was evaluated for.
struct ChannelSummary {
  enum class Kind { attenuator, classical_noise };
  Kind kind = Kind::attenuator;
  // attenuator scalars
  double lambda = 0.0, N_E = 0.0, S_E = 0.0, N_E_ep = 0.0;
  // classical-noise scalars
  double t = 0.0, E_f = 0.0, H_f = 0.0;
};

struct BoundReport {
  double N = 0.0;
  double lower = 0.0;          // raw; may be negative at small N
  double lower_clamped = 0.0;  // max(0, lower), since chi >= 0
  double upper = 0.0;
  double gap_bound = 0.0;  // N-independent bound on upper - lower
  Method method = Method::epi;
  ChannelSummary channel;
};

namespace detail {

inline void check_attenuator_scalars(double N, double lambda, double N_E,
                                     double S_E) {
  if (N < 0.0) throw std::domain_error("photon budget N < 0");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("transmissivity outside [0,1]");
  if (N_E < 0.0) throw std::domain_error("environment photon number < 0");
  if (S_E < 0.0) throw std::domain_error("environment entropy < 0");
  if (S_E > g_function(N_E) + 1e-9)
    throw consistency_error(
        "environment entropy exceeds g(N_E): violates the maximum entropy "
        "principle");
}

inline void check_noise_scalars(double N, double t, double E_f, double H_f) {
  if (N < 0.0) throw std::domain_error("photon budget N < 0");
  if (!(t > 0.0)) throw std::domain_error("noise parameter t must be > 0");
  if (!(E_f > 0.0)) throw std::domain_error("noise energy E(f) must be > 0");
  if (H_f > std::log(M_PI * M_E * E_f) + 1e-9)
    throw consistency_error(
        "noise entropy exceeds ln(pi e E(f)): violates the 2D maximum "
        "entropy bound");
}

inline ChannelSummary attenuator_summary(double lambda, double N_E, double S_E,
                                         double N_E_ep) {
  ChannelSummary c;
  c.kind = ChannelSummary::Kind::attenuator;
  c.lambda = lambda;
  c.N_E = N_E;
  c.S_E = S_E;
  c.N_E_ep = N_E_ep;
  return c;
}

inline ChannelSummary noise_summary(double t, double E_f, double H_f) {
  ChannelSummary c;
  c.kind = ChannelSummary::Kind::classical_noise;
  c.t = t;
  c.E_f = E_f;
  c.H_f = H_f;
  return c;
}

}  // namespace detail

/// EPI bounds for the attenuator:
///   lower = g(lambda N + (1-lambda) N_E^ep) - g((1-lambda) N_E)
///   upper = g(lambda N + (1-lambda) N_E) - ln(lambda + (1-lambda) e^{S_E})
/// with N_E^ep = g^{-1}(S_E); the gap bound is their difference at N = 0.
inline BoundReport attenuator_bounds_epi(double N, double lambda, double N_E,
                                         double S_E) {
  detail::check_attenuator_scalars(N, lambda, N_E, S_E);
  const double N_ep = g_inverse(S_E);
  const double mix = std::log(lambda + (1.0 - lambda) * std::exp(S_E));
  BoundReport r;
  r.N = N;
  r.method = Method::epi;
  r.lower = g_function(lambda * N + (1.0 - lambda) * N_ep) -
            g_function((1.0 - lambda) * N_E);
  r.upper = g_function(lambda * N + (1.0 - lambda) * N_E) - mix;
  r.gap_bound = 2.0 * g_function((1.0 - lambda) * N_E) -
                g_function((1.0 - lambda) * N_ep) - mix;
  r.lower_clamped = std::max(0.0, r.lower);
  r.channel = detail::attenuator_summary(lambda, N_E, S_E, N_ep);
  return r;
}

/// EPI bounds for the classical noise channel:
///   lower = ln(e^{g(N)} + t e^{H_f}) - g(pi t E_f)
///   upper = g(N + pi t E_f) - ln(1 + t e^{H_f})
inline BoundReport classical_noise_bounds_epi(double N, double t, double E_f,
                                              double H_f) {
  detail::check_noise_scalars(N, t, E_f, H_f);
  const double noise_photons = M_PI * t * E_f;
  const double teH = t * std::exp(H_f);
  BoundReport r;
  r.N = N;
  r.method = Method::epi;
  r.lower = std::log(std::exp(g_function(N)) + teH) - g_function(noise_photons);
  r.upper = g_function(N + noise_photons) - std::log1p(teH);
  r.gap_bound = 2.0 * g_function(noise_photons) - std::log1p(teH);
  r.lower_clamped = std::max(0.0, r.lower);
  r.channel = detail::noise_summary(t, E_f, H_f);
  return r;
}

/// EPNI-conditional bounds for the attenuator; the lower bound is the EPI one
/// (the conjecture does not improve it), the upper becomes
///   g(lambda N + (1-lambda) N_E) - g((1-lambda) N_E^ep).
inline BoundReport attenuator_bounds_epni(double N, double lambda, double N_E,
                                          double S_E) {
  detail::check_attenuator_scalars(N, lambda, N_E, S_E);
  const double N_ep = g_inverse(S_E);
  BoundReport r;
  r.N = N;
  r.method = Method::epni;
  r.lower = g_function(lambda * N + (1.0 - lambda) * N_ep) -
            g_function((1.0 - lambda) * N_E);
  r.upper = g_function(lambda * N + (1.0 - lambda) * N_E) -
            g_function((1.0 - lambda) * N_ep);
  r.gap_bound = 2.0 * (g_function((1.0 - lambda) * N_E) -
                       g_function((1.0 - lambda) * N_ep));
  r.lower_clamped = std::max(0.0, r.lower);
  r.channel = detail::attenuator_summary(lambda, N_E, S_E, N_ep);
  return r;
}

/// EPNI-conditional bounds for the classical noise channel:
///   lower = g(N + (t/e) e^{H_f}) - g(pi t E_f)
///   upper = g(N + pi t E_f) - g((t/e) e^{H_f})
inline BoundReport classical_noise_bounds_epni(double N, double t, double E_f,
                                               double H_f) {
  detail::check_noise_scalars(N, t, E_f, H_f);
  const double noise_photons = M_PI * t * E_f;
  const double entropy_photons = t / M_E * std::exp(H_f);
  BoundReport r;
  r.N = N;
  r.method = Method::epni;
  r.lower = g_function(N + entropy_photons) - g_function(noise_photons);
  r.upper = g_function(N + noise_photons) - g_function(entropy_photons);
  r.gap_bound =
      2.0 * (g_function(noise_photons) - g_function(entropy_photons));
  r.lower_clamped = std::max(0.0, r.lower);
  r.channel = detail::noise_summary(t, E_f, H_f);
  return r;
}

struct ShannonBounds {
  double lower = 0.0;
  double upper = 0.0;
  double entropy_power = 0.0;  // N_1 = e^{2 H(Z)} / (2 pi e)
};

/// Classical additive-noise bounds, natural log, implemented exactly as the
/// pair  ln((P+N_1)/N_1) <= C <= ln((P+N)/N_1). Note the conventional AWGN
/// statement carries a 1/2 per real dimension that this pair omits; the
/// Gaussian-noise coincidence (N_1 = N makes them equal) is unaffected.
inline ShannonBounds shannon_additive_bounds(double P, double H_Z, double N) {
  if (P < 0.0) throw std::domain_error("transmitter power P < 0");
  if (!(N > 0.0)) throw std::domain_error("noise power N must be > 0");
  const double N1 = std::exp(2.0 * H_Z) / (2.0 * M_PI * M_E);
  if (N1 > N + 1e-9)
    throw consistency_error(
        "noise entropy power exceeds noise power: violates the maximum "
        "entropy bound");
  return {std::log((P + N1) / N1), std::log((P + N) / N1), N1};
}

/// Evaluate one bound pair for a concrete channel spec.
inline BoundReport evaluate(const channels::ChannelSpec& spec, double N,
                            Method method) {
  if (const auto* att = std::get_if<channels::AttenuatorSpec>(&spec)) {
    const double N_E = att->env.mean_photon();
    const double S_E = att->env.entropy();
    return method == Method::epi
               ? attenuator_bounds_epi(N, att->lambda, N_E, S_E)
               : attenuator_bounds_epni(N, att->lambda, N_E, S_E);
  }
  const auto& cn = std::get<channels::ClassicalNoiseSpec>(spec);
  return method == Method::epi
             ? classical_noise_bounds_epi(N, cn.t, cn.f.energy(), cn.f.entropy())
             : classical_noise_bounds_epni(N, cn.t, cn.f.energy(),
                                           cn.f.entropy());
}

/// Per-point reports along a sorted, nonnegative N grid.
inline std::vector<BoundReport> bound_curve(const channels::ChannelSpec& spec,
                                            std::span<const double> grid,
                                            Method method) {
  std::vector<BoundReport> out;
  out.reserve(grid.size());
  double prev = -1.0;
  for (double N : grid) {
    if (N < 0.0) throw std::domain_error("N grid must be nonnegative");
    if (N < prev) throw std::invalid_argument("N grid must be sorted");
    prev = N;
    out.push_back(evaluate(spec, N, method));
  }
  return out;
}

}  // namespace bcw::bounds
