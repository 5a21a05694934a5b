#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <variant>
#include <vector>

#include "bcw/errors.hpp"
#include "bcw/quadrature.hpp"

// Phase-space noise densities f for the classical noise channel, with their
// energy E(f) = sum_i int xi_i^2 f (second moments about the origin) and
// Shannon entropy H(f) = -int f ln f in nats.

namespace bcw::channels {

using Eigen::Matrix2d;
using Eigen::Vector2d;

struct GaussianComponent {
  double weight = 1.0;
  Vector2d mean = Vector2d::Zero();
  Matrix2d cov = Matrix2d::Identity();
};

struct TabulatedGrid {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  int nx = 0, ny = 0;
  std::vector<double> values;  // row-major, x index major: values[ix*ny + iy]
};

/// Quadrature controls for assembling F_{t,f}. Nodes whose cumulative mass is
/// below prune_budget are dropped before the displacement guard is applied.
struct QuadratureSpec {
  int nodes_per_axis = 41;
  double prune_budget = 5e-7;
  double min_coverage = 1.0 - 1e-6;
};

class NoiseDensity {
 public:
  enum class Kind { gaussian, gaussian_mixture, uniform_disc, tabulated };

  static NoiseDensity gaussian(const Matrix2d& cov,
                               const Vector2d& mean = Vector2d::Zero()) {
    check_covariance(cov);
    NoiseDensity f;
    f.storage_ = Mixture{{GaussianComponent{1.0, mean, cov}}};
    f.kind_ = Kind::gaussian;
    f.finalize();
    return f;
  }

  /// Centered, unit variance per component: E(f) = 2, H(f) = ln(2 pi e).
  static NoiseDensity standard_gaussian() {
    return gaussian(Matrix2d::Identity());
  }

  static NoiseDensity gaussian_mixture(std::vector<GaussianComponent> comps) {
    if (comps.empty())
      throw std::invalid_argument("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : comps) {
      if (c.weight <= 0.0)
        throw std::invalid_argument("mixture weights must be positive");
      check_covariance(c.cov);
      total += c.weight;
    }
    for (auto& c : comps) c.weight /= total;
    NoiseDensity f;
    f.storage_ = Mixture{std::move(comps)};
    f.kind_ = Kind::gaussian_mixture;
    f.finalize();
    return f;
  }

  static NoiseDensity uniform_disc(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be > 0");
    NoiseDensity f;
    f.storage_ = Disc{radius};
    f.kind_ = Kind::uniform_disc;
    f.finalize();
    return f;
  }

  /// Grid values are interpreted as samples of the density at cell centers
  /// and normalized to unit mass.
  static NoiseDensity tabulated(TabulatedGrid grid) {
    if (grid.nx < 1 || grid.ny < 1 ||
        static_cast<int>(grid.values.size()) != grid.nx * grid.ny)
      throw std::invalid_argument("tabulated grid shape mismatch");
    if (!(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin))
      throw std::invalid_argument("tabulated grid extent is empty");
    double mass = 0.0;
    const double cell = cell_area(grid);
    for (double v : grid.values) {
      if (v < 0.0) throw std::invalid_argument("tabulated density has negative values");
      if (!std::isfinite(v)) throw std::invalid_argument("tabulated density not finite");
      mass += v * cell;
    }
    if (mass <= 0.0) throw std::invalid_argument("tabulated density has zero mass");
    for (double& v : grid.values) v /= mass;
    NoiseDensity f;
    f.storage_ = std::move(grid);
    f.kind_ = Kind::tabulated;
    f.finalize();
    return f;
  }

  Kind kind() const { return kind_; }

  /// E(f), dimensionless phase-space energy.
  double energy() const { return energy_; }

  /// H(f) in nats.
  double entropy() const { return entropy_; }

  Vector2d mean() const { return mean_; }

  /// Centered covariance; tr + |mean|^2 = E(f).
  Matrix2d covariance() const { return cov_; }

  double density(double x, double y) const {
    if (const auto* mix = std::get_if<Mixture>(&storage_)) {
      double v = 0.0;
      for (const auto& c : mix->components) {
        const Vector2d d(x - c.mean(0), y - c.mean(1));
        const double det = c.cov.determinant();
        const double q = d.dot(c.cov.inverse() * d);
        v += c.weight * std::exp(-0.5 * q) / (2.0 * M_PI * std::sqrt(det));
      }
      return v;
    }
    if (const auto* disc = std::get_if<Disc>(&storage_)) {
      const double r2 = disc->radius * disc->radius;
      return (x * x + y * y <= r2) ? 1.0 / (M_PI * r2) : 0.0;
    }
    const auto& g = std::get<TabulatedGrid>(storage_);
    const double dx = (g.xmax - g.xmin) / g.nx;
    const double dy = (g.ymax - g.ymin) / g.ny;
    const int ix = static_cast<int>(std::floor((x - g.xmin) / dx));
    const int iy = static_cast<int>(std::floor((y - g.ymin) / dy));
    if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny) return 0.0;
    return g.values[static_cast<std::size_t>(ix) * g.ny + iy];
  }

  // family parameter accessors for serialization
  const std::vector<GaussianComponent>& components() const {
    return std::get<Mixture>(storage_).components;
  }
  double disc_radius() const { return std::get<Disc>(storage_).radius; }
  const TabulatedGrid& grid() const { return std::get<TabulatedGrid>(storage_); }

  /// Mass-weighted phase-space nodes covering at least min_coverage of f.
  /// Gaussian components use tensor Gauss-Hermite, the uniform disc a polar
  /// product rule (Gauss-Legendre in r^2, uniform in angle), tabulated
  /// densities their own cell centers.
  std::vector<quad::Node2D> nodes(const QuadratureSpec& spec) const {
    std::vector<quad::Node2D> raw;
    if (const auto* mix = std::get_if<Mixture>(&storage_)) {
      const auto rule = quad::gauss_hermite(spec.nodes_per_axis);
      for (const auto& c : mix->components) {
        Eigen::LLT<Matrix2d> llt(c.cov);
        const Matrix2d l = llt.matrixL();
        for (int i = 0; i < spec.nodes_per_axis; ++i)
          for (int j = 0; j < spec.nodes_per_axis; ++j) {
            const Vector2d u(rule.nodes(i), rule.nodes(j));
            const Vector2d xi = c.mean + std::sqrt(2.0) * (l * u);
            raw.push_back({xi(0), xi(1),
                           c.weight * rule.weights(i) * rule.weights(j) / M_PI});
          }
      }
    } else if (const auto* disc = std::get_if<Disc>(&storage_)) {
      const auto rule = quad::gauss_legendre(spec.nodes_per_axis);
      const int n_ang = spec.nodes_per_axis;
      const double r2 = disc->radius * disc->radius;
      for (int i = 0; i < spec.nodes_per_axis; ++i) {
        const double u = r2 * 0.5 * (rule.nodes(i) + 1.0);
        const double r = std::sqrt(u);
        const double w = rule.weights(i) / (2.0 * n_ang);
        for (int k = 0; k < n_ang; ++k) {
          const double th = 2.0 * M_PI * (k + 0.5) / n_ang;
          raw.push_back({r * std::cos(th), r * std::sin(th), w});
        }
      }
    } else {
      const auto& g = std::get<TabulatedGrid>(storage_);
      const double dx = (g.xmax - g.xmin) / g.nx;
      const double dy = (g.ymax - g.ymin) / g.ny;
      for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
          const double v = g.values[static_cast<std::size_t>(ix) * g.ny + iy];
          if (v == 0.0) continue;
          raw.push_back({g.xmin + (ix + 0.5) * dx, g.ymin + (iy + 0.5) * dy,
                         v * dx * dy});
        }
    }
    return prune(std::move(raw), spec);
  }

 private:
  struct Mixture {
    std::vector<GaussianComponent> components;
  };
  struct Disc {
    double radius = 1.0;
  };

  static double cell_area(const TabulatedGrid& g) {
    return (g.xmax - g.xmin) / g.nx * (g.ymax - g.ymin) / g.ny;
  }

  static void check_covariance(const Matrix2d& cov) {
    if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12)
      throw std::invalid_argument("noise covariance must be symmetric");
    if (cov(0, 0) <= 0.0 || cov.determinant() <= 0.0)
      throw std::invalid_argument("noise covariance must be positive definite");
  }

  static std::vector<quad::Node2D> prune(std::vector<quad::Node2D> raw,
                                         const QuadratureSpec& spec) {
    std::vector<std::size_t> order(raw.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return raw[a].w < raw[b].w;
    });
    std::vector<bool> dropped(raw.size(), false);
    double removed = 0.0;
    for (std::size_t idx : order) {
      if (removed + raw[idx].w > spec.prune_budget) break;
      removed += raw[idx].w;
      dropped[idx] = true;
    }
    std::vector<quad::Node2D> kept;
    kept.reserve(raw.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
      if (!dropped[i]) {
        kept.push_back(raw[i]);
        mass += raw[i].w;
      }
    if (mass < spec.min_coverage)
      throw coverage_error("quadrature grid covers less than the required mass");
    return kept;
  }

  void finalize() {
    if (const auto* mix = std::get_if<Mixture>(&storage_)) {
      mean_.setZero();
      for (const auto& c : mix->components) mean_ += c.weight * c.mean;
      Matrix2d second = Matrix2d::Zero();
      for (const auto& c : mix->components)
        second += c.weight * (c.cov + c.mean * c.mean.transpose());
      cov_ = second - mean_ * mean_.transpose();
      energy_ = second.trace();
      if (kind_ == Kind::gaussian) {
        entropy_ = std::log(2.0 * M_PI * M_E) +
                   0.5 * std::log(mix->components[0].cov.determinant());
      } else {
        entropy_ = mixture_entropy(*mix);
      }
    } else if (const auto* disc = std::get_if<Disc>(&storage_)) {
      const double r2 = disc->radius * disc->radius;
      mean_.setZero();
      cov_ = (r2 / 4.0) * Matrix2d::Identity();
      energy_ = r2 / 2.0;
      entropy_ = std::log(M_PI * r2);
    } else {
      const auto& g = std::get<TabulatedGrid>(storage_);
      const double dx = (g.xmax - g.xmin) / g.nx;
      const double dy = (g.ymax - g.ymin) / g.ny;
      const double cell = dx * dy;
      mean_.setZero();
      Matrix2d second = Matrix2d::Zero();
      energy_ = 0.0;
      entropy_ = 0.0;
      for (int ix = 0; ix < g.nx; ++ix)
        for (int iy = 0; iy < g.ny; ++iy) {
          const double v = g.values[static_cast<std::size_t>(ix) * g.ny + iy];
          if (v == 0.0) continue;
          const double x = g.xmin + (ix + 0.5) * dx;
          const double y = g.ymin + (iy + 0.5) * dy;
          const Vector2d xi(x, y);
          mean_ += v * cell * xi;
          second += v * cell * xi * xi.transpose();
          entropy_ -= v * std::log(v) * cell;
        }
      energy_ = second.trace();
      cov_ = second - mean_ * mean_.transpose();
    }
    if (!std::isfinite(energy_) || !std::isfinite(entropy_))
      throw std::invalid_argument("noise density has non-finite E(f) or H(f)");
  }

  // -int f ln f by per-component Gauss-Hermite against the mixture density
  double mixture_entropy(const Mixture& mix) const {
    const auto rule = quad::gauss_hermite(64);
    double h = 0.0;
    for (const auto& c : mix.components) {
      Eigen::LLT<Matrix2d> llt(c.cov);
      const Matrix2d l = llt.matrixL();
      double acc = 0.0;
      for (int i = 0; i < rule.nodes.size(); ++i)
        for (int j = 0; j < rule.nodes.size(); ++j) {
          const Vector2d u(rule.nodes(i), rule.nodes(j));
          const Vector2d xi = c.mean + std::sqrt(2.0) * (l * u);
          acc += rule.weights(i) * rule.weights(j) *
                 std::log(density(xi(0), xi(1)));
        }
      h -= c.weight * acc / M_PI;
    }
    return h;
  }

  std::variant<Mixture, Disc, TabulatedGrid> storage_;
  Kind kind_ = Kind::gaussian;
  Vector2d mean_ = Vector2d::Zero();
  Matrix2d cov_ = Matrix2d::Identity();
  double energy_ = 0.0;
  double entropy_ = 0.0;
};

}  // namespace bcw::channels
