#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bcw/channels.hpp"
#include "bcw/errors.hpp"
#include "bcw/fock.hpp"
#include "bcw/gauss.hpp"

// Property-test engine for the entropy inequalities. Theorem-backed checks
// (quantum EPI, cq-EPI, maximum entropy, thermal minimum output entropy) are
// assert-grade; the photon-number inequalities are unproven conjectures and
// are probed flag-only: negative margins become candidate records, never
// failures.

namespace bcw::verify {

using channels::NoiseDensity;
using channels::QuadratureSpec;
using fock::DensityMatrix;

struct InequalityMargin {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // lhs - rhs at the requested dim
  int dim = 0;
  double bias_bound = 0.0;  // 2x the dim -> dim+step drift
  double tolerance = 0.0;   // bias_bound + 1e-6

  bool theorem = true;   // assert-grade vs. probe-grade
  bool violated = false; // theorem margin below -tolerance
  bool flagged = false;  // probe margin below -tolerance (candidate record)

  std::vector<std::pair<std::string, double>> params;
};

inline constexpr int default_bias_step = 8;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline void finalize_margin(InequalityMargin& m, double margin_lo,
                            double margin_hi, double floor_tol = 1e-6) {
  m.margin = margin_lo;
  m.bias_bound = 2.0 * std::abs(margin_hi - margin_lo);
  m.tolerance = m.bias_bound + floor_tol;
  if (m.theorem)
    m.violated = m.margin < -m.tolerance;
  else
    m.flagged = m.margin < -m.tolerance;
}

// Entropies of E_{lambda,sigma}(rho) simulated at dim and dim + step.
struct AttenuatorEntropies {
  double out_lo, out_hi, in_rho, in_sigma;
};

inline AttenuatorEntropies attenuator_entropies(const DensityMatrix& rho,
                                                const DensityMatrix& sigma,
                                                double lambda, int dim,
                                                int step = default_bias_step) {
  const auto env = channels::EnvironmentSpec::explicit_state(sigma);
  AttenuatorEntropies e{};
  e.out_lo = fock::von_neumann_entropy(
      channels::apply_attenuator(rho, lambda, env, dim));
  e.out_hi = fock::von_neumann_entropy(
      channels::apply_attenuator(rho, lambda, env, dim + step));
  e.in_rho = fock::von_neumann_entropy(rho);
  e.in_sigma = fock::von_neumann_entropy(sigma);
  return e;
}

struct NoiseEntropies {
  double out_lo, out_hi, in_rho;
};

inline NoiseEntropies noise_entropies(const DensityMatrix& rho, double t,
                                      const NoiseDensity& f,
                                      const QuadratureSpec& quad, int dim,
                                      int step = default_bias_step) {
  NoiseEntropies e{};
  e.out_lo = fock::von_neumann_entropy(
      channels::apply_classical_noise(fock::resized(rho, dim), t, f, quad));
  e.out_hi = fock::von_neumann_entropy(channels::apply_classical_noise(
      fock::resized(rho, dim + step), t, f, quad));
  e.in_rho = fock::von_neumann_entropy(rho);
  return e;
}

inline InequalityMargin qepi_record(const AttenuatorEntropies& e,
                                    double lambda, int dim) {
  InequalityMargin m;
  m.check = "qepi";
  m.dim = dim;
  m.theorem = true;
  m.lhs = std::exp(e.out_lo);
  m.rhs = lambda * std::exp(e.in_rho) + (1.0 - lambda) * std::exp(e.in_sigma);
  finalize_margin(m, m.lhs - m.rhs, std::exp(e.out_hi) - m.rhs);
  m.params = {{"lambda", lambda}};
  return m;
}

inline InequalityMargin epni_record(const AttenuatorEntropies& e,
                                    double lambda, int dim) {
  InequalityMargin m;
  m.check = "epni";
  m.dim = dim;
  m.theorem = false;
  m.lhs = gauss::g_inverse(e.out_lo);
  m.rhs = lambda * gauss::g_inverse(e.in_rho) +
          (1.0 - lambda) * gauss::g_inverse(e.in_sigma);
  finalize_margin(m, m.lhs - m.rhs, gauss::g_inverse(e.out_hi) - m.rhs);
  m.params = {{"lambda", lambda}};
  return m;
}

inline InequalityMargin cqepi_record(const NoiseEntropies& e, double t,
                                     const NoiseDensity& f, int dim) {
  InequalityMargin m;
  m.check = "cqepi";
  m.dim = dim;
  m.theorem = true;
  m.lhs = std::exp(e.out_lo);
  m.rhs = std::exp(e.in_rho) + t * std::exp(f.entropy());
  finalize_margin(m, m.lhs - m.rhs, std::exp(e.out_hi) - m.rhs);
  m.params = {{"t", t}, {"E_f", f.energy()}, {"H_f", f.entropy()}};
  return m;
}

inline InequalityMargin cqepni_record(const NoiseEntropies& e, double t,
                                      const NoiseDensity& f, int dim) {
  InequalityMargin m;
  m.check = "cqepni";
  m.dim = dim;
  m.theorem = false;
  m.lhs = gauss::g_inverse(e.out_lo);
  m.rhs = gauss::g_inverse(e.in_rho) + t / M_E * std::exp(f.entropy());
  finalize_margin(m, m.lhs - m.rhs, gauss::g_inverse(e.out_hi) - m.rhs);
  m.params = {{"t", t}, {"E_f", f.energy()}, {"H_f", f.entropy()}};
  return m;
}

}  // namespace detail

/// Quantum EPI: e^{S(E_{lambda,sigma}(rho))} >= lambda e^{S(rho)}
///              + (1-lambda) e^{S(sigma)}.
inline InequalityMargin check_qepi(const DensityMatrix& rho,
                                   const DensityMatrix& sigma, double lambda,
                                   int dim) {
  return detail::qepi_record(
      detail::attenuator_entropies(rho, sigma, lambda, dim), lambda, dim);
}

/// cq-EPI: e^{S(F_{t,f}(rho))} >= e^{S(rho)} + t e^{H(f)}.
inline InequalityMargin check_cqepi(const DensityMatrix& rho, double t,
                                    const NoiseDensity& f, int dim,
                                    const QuadratureSpec& quad = {}) {
  return detail::cqepi_record(detail::noise_entropies(rho, t, f, quad, dim), t,
                              f, dim);
}

/// Maximum entropy principle: S([rho]) >= S(rho). Exact on the truncated
/// space (the gaussification moments carry no truncation bias), so the
/// tolerance is the bare 1e-8.
inline InequalityMargin check_maxent(const DensityMatrix& rho) {
  InequalityMargin m;
  m.check = "maxent";
  m.dim = rho.dim;
  m.theorem = true;
  m.lhs = gauss::gaussified_entropy(gauss::extract_moments(rho));
  m.rhs = fock::von_neumann_entropy(rho);
  m.margin = m.lhs - m.rhs;
  m.bias_bound = 0.0;
  m.tolerance = 1e-8;
  m.violated = m.margin < -m.tolerance;
  return m;
}

/// Thermal minimum output entropy:
/// S(E_{lambda,th(N)}(sigma)) >= g(lambda g^{-1}(S(sigma)) + (1-lambda) N).
inline InequalityMargin check_minout_thermal(const DensityMatrix& sigma,
                                             double lambda, double N_thermal,
                                             int dim,
                                             int step = default_bias_step) {
  const auto env = channels::EnvironmentSpec::thermal(N_thermal);
  InequalityMargin m;
  m.check = "minout";
  m.dim = dim;
  m.theorem = true;
  m.lhs = fock::von_neumann_entropy(
      channels::apply_attenuator(sigma, lambda, env, dim));
  const double lhs_hi = fock::von_neumann_entropy(
      channels::apply_attenuator(sigma, lambda, env, dim + step));
  m.rhs = gauss::g_function(
      lambda * gauss::g_inverse(fock::von_neumann_entropy(sigma)) +
      (1.0 - lambda) * N_thermal);
  detail::finalize_margin(m, m.lhs - m.rhs, lhs_hi - m.rhs);
  m.params = {{"lambda", lambda}, {"N_thermal", N_thermal}};
  return m;
}

/// EPNI conjecture probe (n = 1):
/// g^{-1}(S(E_{lambda,sigma}(rho))) >= lambda g^{-1}(S(rho))
///                                     + (1-lambda) g^{-1}(S(sigma)).
/// Flag-only: candidate records are emitted, never failures.
inline InequalityMargin probe_epni(const DensityMatrix& rho,
                                   const DensityMatrix& sigma, double lambda,
                                   int dim) {
  return detail::epni_record(
      detail::attenuator_entropies(rho, sigma, lambda, dim), lambda, dim);
}

/// cq-EPNI conjecture probe:
/// g^{-1}(S(F_{t,f}(rho))) >= g^{-1}(S(rho)) + (t/e) e^{H(f)}. Flag-only.
inline InequalityMargin probe_cqepni(const DensityMatrix& rho, double t,
                                     const NoiseDensity& f, int dim,
                                     const QuadratureSpec& quad = {}) {
  return detail::cqepni_record(detail::noise_entropies(rho, t, f, quad, dim),
                               t, f, dim);
}

/// Thermal-input special case of the cq-EPNI:
/// g^{-1}(S(F_{t,f}(rho_th,N))) >= N + (t/e) e^{H(f)}. Flag-only.
inline InequalityMargin probe_cqepni_thermal(double N, double t,
                                             const NoiseDensity& f, int dim,
                                             const QuadratureSpec& quad = {},
                                             int step = default_bias_step) {
  if (fock::thermal_tail_mass(N, dim) > channels::family_tail_budget)
    throw truncation_error("thermal input tail exceeds budget at dim");
  InequalityMargin m;
  m.check = "cqepni_thermal";
  m.dim = dim;
  m.theorem = false;
  const double s_lo = fock::von_neumann_entropy(channels::apply_classical_noise(
      fock::make_thermal_state(N, dim), t, f, quad));
  const double s_hi = fock::von_neumann_entropy(channels::apply_classical_noise(
      fock::make_thermal_state(N, dim + step), t, f, quad));
  m.lhs = gauss::g_inverse(s_lo);
  m.rhs = N + t / M_E * std::exp(f.entropy());
  detail::finalize_margin(m, m.lhs - m.rhs, gauss::g_inverse(s_hi) - m.rhs);
  m.params = {{"N", N}, {"t", t}, {"H_f", f.entropy()}};
  return m;
}

/// Sweep configuration; parsed from a plain key = value text file.
struct SuiteConfig {
  std::uint64_t seed = 20270101;
  int qepi_trials = 200;
  int qepi_dim = 16;
  int cqepi_trials = 100;
  int cqepi_dim = 24;
  int quad_nodes = 41;
  int maxent_trials = 100;
  int maxent_dim = 16;
  int minout_trials = 100;
  int minout_dim = 40;
  int cqepni_thermal_trials = 20;
  double photon_cap = 1.5;
  double lambda_min = 0.05;
  double lambda_max = 0.95;
  double t_min = 0.01;
  double t_max = 0.045;
  int bias_step = default_bias_step;

  static SuiteConfig parse(std::istream& in);
};

inline SuiteConfig SuiteConfig::parse(std::istream& in) {
  SuiteConfig c;
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto geti = [&](const char* k, int& dst) {
    if (auto it = kv.find(k); it != kv.end()) dst = std::stoi(it->second);
  };
  auto getd = [&](const char* k, double& dst) {
    if (auto it = kv.find(k); it != kv.end()) dst = std::stod(it->second);
  };
  if (auto it = kv.find("seed"); it != kv.end())
    c.seed = std::stoull(it->second);
  geti("qepi_trials", c.qepi_trials);
  geti("qepi_dim", c.qepi_dim);
  geti("cqepi_trials", c.cqepi_trials);
  geti("cqepi_dim", c.cqepi_dim);
  geti("quad_nodes", c.quad_nodes);
  geti("maxent_trials", c.maxent_trials);
  geti("maxent_dim", c.maxent_dim);
  geti("minout_trials", c.minout_trials);
  geti("minout_dim", c.minout_dim);
  geti("cqepni_thermal_trials", c.cqepni_thermal_trials);
  getd("photon_cap", c.photon_cap);
  getd("lambda_min", c.lambda_min);
  getd("lambda_max", c.lambda_max);
  getd("t_min", c.t_min);
  getd("t_max", c.t_max);
  geti("bias_step", c.bias_step);
  const std::vector<std::string> known = {
      "seed",          "qepi_trials",  "qepi_dim",
      "cqepi_trials",  "cqepi_dim",    "quad_nodes",
      "maxent_trials", "maxent_dim",   "minout_trials",
      "minout_dim",    "cqepni_thermal_trials", "photon_cap",
      "lambda_min",    "lambda_max",   "t_min",
      "t_max",         "bias_step"};
  for (const auto& [k, v] : kv)
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw std::invalid_argument("unknown config key: " + k);
  return c;
}

struct SuiteReport {
  SuiteConfig config;
  std::vector<InequalityMargin> qepi, epni, cqepi, cqepni, cqepni_thermal,
      maxent, minout;
  std::vector<std::string> errors;  // guard failures surfaced per trial

  int violations() const {
    int n = 0;
    for (const auto* group : {&qepi, &cqepi, &maxent, &minout})
      for (const auto& m : *group) n += m.violated ? 1 : 0;
    return n;
  }
  int candidates() const {
    int n = 0;
    for (const auto* group : {&epni, &cqepni, &cqepni_thermal})
      for (const auto& m : *group) n += m.flagged ? 1 : 0;
    return n;
  }
  /// Pass means no theorem violations and no trial-level errors; conjecture
  /// candidates never fail the suite.
  bool passed() const { return violations() == 0 && errors.empty(); }
};

namespace detail {

class TrialRng {
 public:
  explicit TrialRng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * fock::detail::uniform01(gen_);
  }
  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Deterministic per-trial noise density cycling through the four families.
inline NoiseDensity random_noise_density(TrialRng& rng, int trial) {
  using Eigen::Matrix2d;
  using Eigen::Vector2d;
  switch (trial % 4) {
    case 0: {
      Matrix2d cov = Matrix2d::Zero();
      cov(0, 0) = rng.uniform(0.3, 1.0);
      cov(1, 1) = rng.uniform(0.3, 1.0);
      const Vector2d mean(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
      return NoiseDensity::gaussian(cov, mean);
    }
    case 1: {
      std::vector<channels::GaussianComponent> comps(2);
      for (auto& comp : comps) {
        comp.weight = rng.uniform(0.3, 0.7);
        comp.mean = Vector2d(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        comp.cov = Matrix2d::Zero();
        comp.cov(0, 0) = rng.uniform(0.2, 0.6);
        comp.cov(1, 1) = rng.uniform(0.2, 0.6);
      }
      return NoiseDensity::gaussian_mixture(std::move(comps));
    }
    case 2:
      return NoiseDensity::uniform_disc(rng.uniform(0.5, 2.0));
    default: {
      // step-density snapshot of a random two-gaussian mixture
      channels::TabulatedGrid grid;
      grid.xmin = grid.ymin = -3.0;
      grid.xmax = grid.ymax = 3.0;
      grid.nx = grid.ny = 33;
      const Vector2d m1(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      const Vector2d m2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      const double s1 = rng.uniform(0.3, 0.8), s2 = rng.uniform(0.3, 0.8);
      const double w1 = rng.uniform(0.3, 0.7);
      grid.values.resize(static_cast<std::size_t>(grid.nx) * grid.ny);
      const double dx = (grid.xmax - grid.xmin) / grid.nx;
      const double dy = (grid.ymax - grid.ymin) / grid.ny;
      for (int ix = 0; ix < grid.nx; ++ix)
        for (int iy = 0; iy < grid.ny; ++iy) {
          const double x = grid.xmin + (ix + 0.5) * dx;
          const double y = grid.ymin + (iy + 0.5) * dy;
          const double g1 = std::exp(-0.5 * ((x - m1(0)) * (x - m1(0)) +
                                             (y - m1(1)) * (y - m1(1))) / s1) /
                            (2.0 * M_PI * s1);
          const double g2 = std::exp(-0.5 * ((x - m2(0)) * (x - m2(0)) +
                                             (y - m2(1)) * (y - m2(1))) / s2) /
                            (2.0 * M_PI * s2);
          grid.values[static_cast<std::size_t>(ix) * grid.ny + iy] =
              w1 * g1 + (1.0 - w1) * g2;
        }
      return NoiseDensity::tabulated(std::move(grid));
    }
  }
}

}  // namespace detail

/// Run the whole sweep. Trial seeds derive deterministically from the master
/// seed, so identical configs produce identical reports.
inline SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport report;
  report.config = config;
  QuadratureSpec quad;
  quad.nodes_per_axis = config.quad_nodes;

  auto trial_seed = [&](std::uint64_t stream, int trial) {
    return detail::splitmix64(config.seed ^ (stream * 0x51ed2701ULL + trial));
  };

  for (int trial = 0; trial < config.qepi_trials; ++trial) {
    detail::TrialRng rng(trial_seed(1, trial));
    const double lambda = rng.uniform(config.lambda_min, config.lambda_max);
    const auto rho = fock::random_density_matrix(config.qepi_dim,
                                                 config.photon_cap, rng.raw());
    const auto sigma = fock::random_density_matrix(
        config.qepi_dim, config.photon_cap, rng.raw());
    try {
      const auto ent = detail::attenuator_entropies(
          rho, sigma, lambda, config.qepi_dim, config.bias_step);
      auto check = detail::qepi_record(ent, lambda, config.qepi_dim);
      auto probe = detail::epni_record(ent, lambda, config.qepi_dim);
      check.params.emplace_back("trial", trial);
      probe.params.emplace_back("trial", trial);
      report.qepi.push_back(std::move(check));
      report.epni.push_back(std::move(probe));
    } catch (const std::exception& ex) {
      report.errors.push_back("qepi trial " + std::to_string(trial) + ": " +
                              ex.what());
    }
  }

  for (int trial = 0; trial < config.cqepi_trials; ++trial) {
    detail::TrialRng rng(trial_seed(2, trial));
    const double t = rng.uniform(config.t_min, config.t_max);
    const auto rho = fock::random_density_matrix(config.cqepi_dim,
                                                 config.photon_cap, rng.raw());
    try {
      const auto f = detail::random_noise_density(rng, trial);
      const auto ent = detail::noise_entropies(rho, t, f, quad,
                                               config.cqepi_dim,
                                               config.bias_step);
      auto check = detail::cqepi_record(ent, t, f, config.cqepi_dim);
      auto probe = detail::cqepni_record(ent, t, f, config.cqepi_dim);
      check.params.emplace_back("trial", trial);
      probe.params.emplace_back("trial", trial);
      report.cqepi.push_back(std::move(check));
      report.cqepni.push_back(std::move(probe));
    } catch (const std::exception& ex) {
      report.errors.push_back("cqepi trial " + std::to_string(trial) + ": " +
                              ex.what());
    }
  }

  for (int trial = 0; trial < config.maxent_trials; ++trial) {
    detail::TrialRng rng(trial_seed(3, trial));
    const auto rho = fock::random_density_matrix(config.maxent_dim,
                                                 config.photon_cap, rng.raw());
    try {
      auto rec = check_maxent(rho);
      rec.params.emplace_back("trial", trial);
      report.maxent.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      report.errors.push_back("maxent trial " + std::to_string(trial) + ": " +
                              ex.what());
    }
  }

  for (int trial = 0; trial < config.minout_trials; ++trial) {
    detail::TrialRng rng(trial_seed(4, trial));
    const double lambda = rng.uniform(config.lambda_min, config.lambda_max);
    const double N_thermal = rng.uniform(0.1, config.photon_cap);
    const auto sigma = fock::random_density_matrix(
        config.qepi_dim, config.photon_cap, rng.raw());
    try {
      auto rec = check_minout_thermal(sigma, lambda, N_thermal,
                                      config.minout_dim, config.bias_step);
      rec.params.emplace_back("trial", trial);
      report.minout.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      report.errors.push_back("minout trial " + std::to_string(trial) + ": " +
                              ex.what());
    }
  }

  for (int trial = 0; trial < config.cqepni_thermal_trials; ++trial) {
    detail::TrialRng rng(trial_seed(5, trial));
    const double t = rng.uniform(config.t_min, config.t_max);
    const double N = rng.uniform(0.0, config.photon_cap);
    try {
      const auto f = detail::random_noise_density(rng, trial);
      auto rec = probe_cqepni_thermal(N, t, f, config.cqepi_dim, quad,
                                      config.bias_step);
      rec.params.emplace_back("trial", trial);
      report.cqepni_thermal.push_back(std::move(rec));
    } catch (const std::exception& ex) {
      report.errors.push_back("cqepni_thermal trial " + std::to_string(trial) +
                              ": " + ex.what());
    }
  }

  return report;
}

}  // namespace bcw::verify
