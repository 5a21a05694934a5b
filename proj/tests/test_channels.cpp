#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "bcw/bounds.hpp"
#include "bcw/channels.hpp"
#include "bcw/fock.hpp"
#include "bcw/gauss.hpp"

using namespace bcw;
using channels::EnvironmentSpec;
using channels::NoiseDensity;
using fock::complexd;
using Catch::Matchers::WithinAbs;

namespace {

double g_ref(double N) {
  return N == 0.0 ? 0.0 : (N + 1.0) * std::log(N + 1.0) - N * std::log(N);
}

}  // namespace

TEST_CASE("environment specs recompute their scalars", "[channels]") {
  const auto th = EnvironmentSpec::thermal(2.0);
  CHECK_THAT(th.mean_photon(), WithinAbs(2.0, 1e-15));
  CHECK_THAT(th.entropy(), WithinAbs(g_ref(2.0), 1e-14));
  CHECK_THAT(th.entropy_photon(), WithinAbs(2.0, 1e-9));

  const auto num = EnvironmentSpec::number(3);
  CHECK(num.mean_photon() == 3.0);
  CHECK(num.entropy() == 0.0);
  CHECK(num.entropy_photon() == 0.0);

  const auto coh = EnvironmentSpec::coherent(complexd(1.0, -1.0));
  CHECK_THAT(coh.mean_photon(), WithinAbs(2.0, 1e-15));
  CHECK(coh.entropy() == 0.0);

  Eigen::VectorXcd c(4);
  c << 2.0, 0.0, 0.0, 2.0;  // normalized internally
  const auto sup = EnvironmentSpec::superposition(c);
  CHECK_THAT(sup.mean_photon(), WithinAbs(1.5, 1e-14));
  CHECK(sup.entropy() == 0.0);

  const auto expl =
      EnvironmentSpec::explicit_state(fock::make_thermal_state(1.0, 40));
  CHECK_THAT(expl.mean_photon(), WithinAbs(1.0, 1e-10));
  CHECK_THAT(expl.entropy(), WithinAbs(g_ref(1.0), 1e-8));

  SECTION("realization guards the family tail") {
    CHECK_THROWS_AS(EnvironmentSpec::thermal(8.0).realize(4), truncation_error);
    CHECK_THROWS_AS(EnvironmentSpec::number(5).realize(4), truncation_error);
    CHECK_NOTHROW(EnvironmentSpec::thermal(2.0).realize(30));
  }
}

TEST_CASE("attenuator applier", "[channels]") {
  SECTION("full transmission is the identity") {
    const auto rho = fock::random_density_matrix(20, 2.0, 5);
    const auto out =
        channels::apply_attenuator(rho, 1.0, EnvironmentSpec::thermal(2.0), 20);
    CHECK(fock::trace_distance(out, rho) < 1e-9);
  }

  SECTION("thermal environment sets the output photon number") {
    const auto vac = fock::make_number_state(0, 60);
    const auto out =
        channels::apply_attenuator(vac, 0.75, EnvironmentSpec::thermal(2.0), 60);
    CHECK_THAT(fock::mean_photon_number(out), WithinAbs(0.5, 1e-6));
  }

  SECTION("pure loss sends coherent states to attenuated coherent states") {
    const auto in = fock::make_coherent_state(1.0, 30);
    const auto out =
        channels::apply_attenuator(in, 0.75, EnvironmentSpec::vacuum(), 30);
    const auto expected = fock::make_coherent_state(std::sqrt(0.75), 30);
    CHECK(fock::trace_distance(out, expected) < 1e-6);
    CHECK(fock::von_neumann_entropy(out) < 1e-6);
  }

  SECTION("channel symmetry under role swap") {
    const auto rho = fock::resized(fock::random_density_matrix(5, 2.0, 61), 12);
    const auto sigma = fock::resized(fock::random_density_matrix(5, 1.0, 62), 12);
    const auto a = channels::apply_attenuator(
        rho, 0.3, EnvironmentSpec::explicit_state(sigma), 12);
    const auto b = channels::apply_attenuator(
        sigma, 0.7, EnvironmentSpec::explicit_state(rho), 12);
    CHECK(fock::trace_distance(a, b) < 1e-8);
  }
}

TEST_CASE("classical noise applier", "[channels]") {
  SECTION("narrow noise acts as the identity") {
    Eigen::Matrix2d cov = 1e-10 * Eigen::Matrix2d::Identity();
    const auto f = NoiseDensity::gaussian(cov);
    const auto rho = fock::random_density_matrix(16, 1.5, 77);
    const auto out = channels::apply_classical_noise(rho, 1.0, f);
    CHECK(fock::trace_distance(out, rho) < 1e-6);
  }

  SECTION("standard gaussian noise at t=1 thermalizes the vacuum") {
    // needs a large truncation: quadrature nodes reach |alpha|^2 ~ 90 and the
    // dim/4 guard applies per node
    const auto f = NoiseDensity::standard_gaussian();
    CHECK_THAT(f.energy(), WithinAbs(2.0, 1e-14));
    CHECK_THAT(f.entropy(), WithinAbs(std::log(2.0 * M_PI * M_E), 1e-14));

    channels::QuadratureSpec quad;
    quad.nodes_per_axis = 21;
    quad.prune_budget = 9e-7;
    const auto nodes = f.nodes(quad);
    double max_alpha2 = 0.0;
    for (const auto& n : nodes)
      max_alpha2 = std::max(max_alpha2, M_PI * (n.x * n.x + n.y * n.y));
    const int dim = static_cast<int>(std::ceil(4.0 * max_alpha2)) + 8;

    const auto out = channels::apply_classical_noise(
        fock::make_number_state(0, dim), 1.0, f, quad);
    CHECK_THAT(fock::mean_photon_number(out), WithinAbs(2.0 * M_PI, 1e-3));
    const double s = fock::von_neumann_entropy(out);
    CHECK_THAT(s, WithinAbs(g_ref(2.0 * M_PI), 5e-3));
    // cq-EPI instance with both sides analytic:
    // e^{S} ~ e^{g(2 pi)} = 18.42 >= 1 + 2 pi e = 18.08
    CHECK(std::exp(s) >= 1.0 + 2.0 * M_PI * M_E - 0.05);
  }

  SECTION("dim/4 guard rejects underresolved displacements") {
    const auto f = NoiseDensity::standard_gaussian();
    CHECK_THROWS_AS(channels::apply_classical_noise(
                        fock::make_number_state(0, 16), 1.0, f),
                    truncation_error);
  }
}

TEST_CASE("noise densities", "[channels]") {
  SECTION("uniform disc") {
    const auto f = NoiseDensity::uniform_disc(1.5);
    CHECK_THAT(f.energy(), WithinAbs(1.125, 1e-14));
    CHECK_THAT(f.entropy(), WithinAbs(std::log(M_PI * 2.25), 1e-14));
    double mass = 0.0, energy = 0.0;
    for (const auto& n : f.nodes({})) {
      mass += n.w;
      energy += n.w * (n.x * n.x + n.y * n.y);
    }
    CHECK_THAT(mass, WithinAbs(1.0, 1e-9));
    CHECK_THAT(energy, WithinAbs(1.125, 1e-9));
  }

  SECTION("two-component mixture") {
    std::vector<channels::GaussianComponent> comps(2);
    comps[0].weight = 0.4;
    comps[0].mean << 1.0, 0.0;
    comps[0].cov = 0.25 * Eigen::Matrix2d::Identity();
    comps[1].weight = 0.6;
    comps[1].mean << -0.5, 0.5;
    comps[1].cov = 0.5 * Eigen::Matrix2d::Identity();
    const auto f = NoiseDensity::gaussian_mixture(comps);
    const double expected_E = 0.4 * (0.5 + 1.0) + 0.6 * (1.0 + 0.5);
    CHECK_THAT(f.energy(), WithinAbs(expected_E, 1e-12));
    // mixture entropy lies between the component average and that plus the
    // mixing entropy
    const double h0 = std::log(2.0 * M_PI * M_E) + std::log(0.25);
    const double h1 = std::log(2.0 * M_PI * M_E) + std::log(0.5);
    const double base = 0.4 * h0 + 0.6 * h1;
    const double mixing = -(0.4 * std::log(0.4) + 0.6 * std::log(0.6));
    CHECK(f.entropy() >= base - 1e-9);
    CHECK(f.entropy() <= base + mixing + 1e-9);
    CHECK(f.entropy() <= std::log(M_PI * M_E * f.energy()) + 1e-12);
  }

  SECTION("tabulated grid normalizes and covers unit mass") {
    channels::TabulatedGrid grid;
    grid.xmin = grid.ymin = -2.0;
    grid.xmax = grid.ymax = 2.0;
    grid.nx = grid.ny = 21;
    grid.values.assign(21 * 21, 3.7);  // uniform square, unnormalized
    const auto f = NoiseDensity::tabulated(grid);
    CHECK_THAT(f.entropy(), WithinAbs(std::log(16.0), 1e-12));
    double mass = 0.0;
    for (const auto& n : f.nodes({})) mass += n.w;
    CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(NoiseDensity::tabulated(channels::TabulatedGrid{}),
                    std::invalid_argument);
  }
}

TEST_CASE("output moments", "[channels]") {
  SECTION("attenuator identity at lambda = 1") {
    gauss::GaussianMoments in;
    in.mean << 0.7, -0.2;
    in.cov << 0.9, 0.1, 0.1, 0.8;
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{1.0, EnvironmentSpec::thermal(2.0)};
    const auto out = channels::output_moments(spec, in);
    CHECK((out.mean - in.mean).norm() < 1e-14);
    CHECK((out.cov - in.cov).norm() < 1e-14);
  }

  SECTION("thermal environment arithmetic") {
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{0.75, EnvironmentSpec::thermal(2.0)};
    const auto out = channels::output_moments(spec, gauss::GaussianMoments{});
    CHECK((out.cov - Eigen::Matrix2d::Identity()).norm() < 1e-14);
    CHECK_THAT(channels::moments_photon_number(out), WithinAbs(0.5, 1e-14));
  }

  SECTION("classical noise adds pi t E(f) photons") {
    const channels::ChannelSpec spec =
        channels::ClassicalNoiseSpec{1.0, NoiseDensity::standard_gaussian()};
    const auto out = channels::output_moments(spec, gauss::GaussianMoments{});
    CHECK_THAT(channels::moments_photon_number(out),
               WithinAbs(2.0 * M_PI, 1e-12));
  }

  SECTION("simulation matches the analytic moments") {
    struct Case {
      double lambda;
      EnvironmentSpec env;
      fock::DensityMatrix input;
      int dim;
    };
    const std::vector<Case> cases = {
        {0.75, EnvironmentSpec::thermal(1.0),
         fock::make_coherent_state(0.8, 60), 60},
        {0.4, EnvironmentSpec::number(2), fock::make_thermal_state(0.7, 60),
         60},
        {0.6, EnvironmentSpec::coherent(complexd(0.5, 0.5)),
         fock::make_coherent_state(complexd(0.0, 1.0), 60), 60},
    };
    for (const auto& c : cases) {
      const auto out =
          channels::apply_attenuator(c.input, c.lambda, c.env, c.dim);
      const auto sim = gauss::extract_moments(out);
      const auto ana = channels::output_moments(
          channels::AttenuatorSpec{c.lambda, c.env},
          gauss::extract_moments(fock::resized(c.input, c.dim)));
      CHECK((sim.mean - ana.mean).norm() < 1e-5);
      CHECK((sim.cov - ana.cov).norm() < 1e-5);
    }

    const auto f = NoiseDensity::uniform_disc(1.5);
    const auto in = fock::make_coherent_state(0.6, 40);
    const auto out = channels::apply_classical_noise(in, 0.5, f);
    const auto sim = gauss::extract_moments(out);
    const auto ana = channels::output_moments(
        channels::ClassicalNoiseSpec{0.5, f}, gauss::extract_moments(in));
    CHECK((sim.mean - ana.mean).norm() < 1e-5);
    CHECK((sim.cov - ana.cov).norm() < 1e-5);
  }
}

TEST_CASE("holevo coherent rate", "[channels]") {
  SECTION("pure loss reproduces g(lambda N)") {
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{0.75, EnvironmentSpec::vacuum()};
    const double rate = channels::holevo_coherent_rate(spec, 2.0, 40);
    CHECK_THAT(rate, WithinAbs(g_ref(1.5), 5e-3));
    CHECK_THAT(rate, WithinAbs(1.6825291675231411, 5e-3));
  }

  SECTION("thermal environment reproduces the Gaussian capacity") {
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{0.75, EnvironmentSpec::thermal(2.0)};
    const double rate = channels::holevo_coherent_rate(spec, 2.0, 60);
    CHECK_THAT(rate, WithinAbs(g_ref(2.0) - g_ref(0.5), 5e-3));
  }

  SECTION("zero budget gives zero rate") {
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{0.75, EnvironmentSpec::vacuum()};
    CHECK_THAT(channels::holevo_coherent_rate(spec, 0.0, 30),
               WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("holevo rate is sandwiched by the closed-form bounds",
          "[channels][invariants]") {
  const double tol = 5e-3;

  struct AttCase {
    double lambda, N;
    EnvironmentSpec env;
    int dim;
  };
  Eigen::VectorXcd sup(4);
  sup << 1.0, 0.0, 0.0, 1.0;
  const std::vector<AttCase> att_cases = {
      {0.75, 2.0, EnvironmentSpec::number(2), 40},
      {0.6, 1.5, EnvironmentSpec::superposition(sup), 40},
      {0.3, 1.0, EnvironmentSpec::number(1), 40},
      {0.85, 2.5, EnvironmentSpec::thermal(1.0), 60},
  };
  for (const auto& c : att_cases) {
    const channels::ChannelSpec spec =
        channels::AttenuatorSpec{c.lambda, c.env};
    const double rate = channels::holevo_coherent_rate(spec, c.N, c.dim);
    const auto epi = bounds::evaluate(spec, c.N, bounds::Method::epi);
    const auto epni = bounds::evaluate(spec, c.N, bounds::Method::epni);
    CHECK(rate >= epi.lower - tol);
    CHECK(rate <= epi.upper + tol);
    CHECK(rate >= epni.lower - tol);
    CHECK(rate <= epni.upper + tol);
  }

  struct NoiseCase {
    double t, N;
    NoiseDensity f;
    int dim;
  };
  std::vector<channels::GaussianComponent> comps(2);
  comps[0].weight = 0.5;
  comps[0].mean << 0.8, 0.0;
  comps[0].cov = 0.3 * Eigen::Matrix2d::Identity();
  comps[1].weight = 0.5;
  comps[1].mean << -0.8, 0.0;
  comps[1].cov = 0.3 * Eigen::Matrix2d::Identity();
  const std::vector<NoiseCase> noise_cases = {
      {0.3, 1.0, NoiseDensity::uniform_disc(1.5), 48},
      {0.2, 1.5, NoiseDensity::gaussian_mixture(comps), 56},
  };
  for (const auto& c : noise_cases) {
    const channels::ChannelSpec spec = channels::ClassicalNoiseSpec{c.t, c.f};
    const double rate = channels::holevo_coherent_rate(spec, c.N, c.dim);
    const auto epi = bounds::evaluate(spec, c.N, bounds::Method::epi);
    const auto epni = bounds::evaluate(spec, c.N, bounds::Method::epni);
    CHECK(rate >= epi.lower - tol);
    CHECK(rate <= epi.upper + tol);
    CHECK(rate >= epni.lower - tol);
    CHECK(rate <= epni.upper + tol);
  }
}

TEST_CASE("gaussification closure under gaussian channels",
          "[channels][invariants]") {
  const auto in = fock::make_coherent_state(complexd(0.5, -0.3), 50);
  const channels::ChannelSpec spec =
      channels::AttenuatorSpec{0.7, EnvironmentSpec::thermal(0.8)};
  const auto out =
      channels::apply_attenuator(in, 0.7, EnvironmentSpec::thermal(0.8), 50);
  const auto sim = gauss::extract_moments(out);
  const auto ana = channels::output_moments(spec, gauss::extract_moments(in));
  CHECK((sim.mean - ana.mean).norm() < 1e-5);
  CHECK((sim.cov - ana.cov).norm() < 1e-5);
}
