#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "bcw/fock.hpp"

using namespace bcw;
using fock::complexd;
using fock::DensityMatrix;
using Catch::Matchers::WithinAbs;

namespace {

// independent entropy oracle over explicit probabilities
double shannon(std::initializer_list<double> probs) {
  double s = 0.0;
  for (double p : probs)
    if (p > 0.0) s -= p * std::log(p);
  return s;
}

}  // namespace

TEST_CASE("number states", "[fock]") {
  const auto vac = fock::make_number_state(0, 10);
  CHECK(fock::von_neumann_entropy(vac) == 0.0);
  CHECK(fock::mean_photon_number(vac) == 0.0);

  const auto two = fock::make_number_state(2, 10);
  CHECK_THAT(fock::mean_photon_number(two), WithinAbs(2.0, 1e-15));
  CHECK_THAT(fock::von_neumann_entropy(two), WithinAbs(0.0, 1e-12));
  fock::validate(two);

  CHECK_THROWS_AS(fock::make_number_state(10, 10), std::out_of_range);
  CHECK_THROWS_AS(fock::make_number_state(-1, 10), std::out_of_range);
}

TEST_CASE("coherent states", "[fock]") {
  const auto vac = fock::make_coherent_state(0.0, 10);
  CHECK(fock::trace_distance(vac, fock::make_number_state(0, 10)) < 1e-14);

  const auto alpha1 = fock::make_coherent_state(1.0, 30);
  CHECK_THAT(fock::mean_photon_number(alpha1), WithinAbs(1.0, 1e-8));
  CHECK_THAT(fock::von_neumann_entropy(alpha1), WithinAbs(0.0, 1e-8));
  fock::validate(alpha1);

  CHECK(fock::coherent_tail_mass(1.0, 30) < 1e-20);
  CHECK_THROWS_AS(fock::make_coherent_state(complexd(4.0, 0.0), 10),
                  truncation_error);
}

TEST_CASE("thermal states", "[fock]") {
  const auto vac = fock::make_thermal_state(0.0, 10);
  CHECK(fock::von_neumann_entropy(vac) == 0.0);

  const auto th2 = fock::make_thermal_state(2.0, 60);
  // g(2) = 3 ln 3 - 2 ln 2
  const double g2 = 3.0 * std::log(3.0) - 2.0 * std::log(2.0);
  CHECK_THAT(fock::von_neumann_entropy(th2), WithinAbs(g2, 1e-8));
  CHECK_THAT(fock::von_neumann_entropy(th2), WithinAbs(1.9095, 1e-4));
  CHECK_THAT(fock::mean_photon_number(th2), WithinAbs(2.0, 1e-6));

  const auto th1 = fock::make_thermal_state(1.0, 60);
  CHECK_THAT(fock::von_neumann_entropy(th1),
             WithinAbs(2.0 * std::log(2.0), 1e-6));

  CHECK_THAT(fock::thermal_tail_mass(2.0, 60), WithinAbs(std::pow(2.0 / 3.0, 60), 1e-25));
  CHECK_THROWS_AS(fock::make_thermal_state(-0.5, 10), std::domain_error);
}

TEST_CASE("displacement operator", "[fock]") {
  const auto id = fock::displacement_operator(0.0, 12);
  CHECK((id.entries - fock::MatrixXcd::Identity(12, 12)).cwiseAbs().maxCoeff() <
        1e-13);

  const int dim = 30;
  const complexd alpha(0.7, -0.4);
  const auto d = fock::displacement_operator(alpha, dim);
  CHECK((d.entries.adjoint() * d.entries - fock::MatrixXcd::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  // defining property: D(alpha)|0><0|D(alpha)^dag is the coherent state
  const auto displaced_vac =
      fock::apply_unitary(d, fock::make_number_state(0, dim));
  CHECK(fock::trace_distance(displaced_vac,
                             fock::make_coherent_state(alpha, dim)) < 1e-8);

  // moment displacement on a centered state: adds exactly |alpha|^2 photons
  const auto th = fock::make_thermal_state(1.0, 40);
  const auto d2 = fock::displacement_operator(0.8, 40);
  const double before = fock::mean_photon_number(th);
  const double after = fock::mean_photon_number(fock::apply_unitary(d2, th));
  CHECK_THAT(after, WithinAbs(before + 0.64, 1e-8));

  CHECK_THROWS_AS(fock::displacement_operator(complexd(3.0, 3.0), 16),
                  truncation_error);
}

TEST_CASE("beamsplitter unitary", "[fock]") {
  SECTION("full transmission is the identity") {
    const auto u = fock::beamsplitter_unitary(1.0, 6);
    CHECK((u.entries - fock::MatrixXcd::Identity(36, 36)).cwiseAbs().maxCoeff() <
          1e-13);
  }

  SECTION("unitary and photon conserving") {
    const int dim = 6;
    const auto u = fock::beamsplitter_unitary(0.37, dim);
    CHECK((u.entries.adjoint() * u.entries -
           fock::MatrixXcd::Identity(dim * dim, dim * dim))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    const auto rho = fock::random_density_matrix(dim, 2.0, 11);
    const auto sigma = fock::random_density_matrix(dim, 1.0, 12);
    const auto joint = fock::tensor_product(rho, sigma);
    const auto rotated = fock::apply_unitary(u, joint);
    CHECK_THAT(fock::mean_photon_number(rotated),
               WithinAbs(fock::mean_photon_number(joint), 1e-10));
  }

  SECTION("single photon splits as lambda : 1 - lambda") {
    const auto rho = fock::make_number_state(1, 4);
    const auto sigma = fock::make_number_state(0, 4);
    const auto out = fock::beamsplitter_reduced(rho, sigma, 0.75);
    CHECK_THAT(out.entries(0, 0).real(), WithinAbs(0.25, 1e-12));
    CHECK_THAT(out.entries(1, 1).real(), WithinAbs(0.75, 1e-12));
  }
}

TEST_CASE("partial trace", "[fock]") {
  const auto rho = fock::random_density_matrix(5, 1.5, 21);
  const auto sigma = fock::random_density_matrix(5, 1.0, 22);
  const auto joint = fock::tensor_product(rho, sigma);

  CHECK(fock::trace_distance(fock::partial_trace(joint, 0), rho) < 1e-12);
  CHECK(fock::trace_distance(fock::partial_trace(joint, 1), sigma) < 1e-12);
  CHECK_THAT(fock::trace_real(fock::partial_trace(joint, 0).entries),
             WithinAbs(fock::trace_real(joint.entries), 1e-12));

  // maximally correlated diagonal state on the {|00>,|11>} sector
  DensityMatrix corr{2, 2, fock::MatrixXcd::Zero(4, 4)};
  corr.entries(0, 0) = 0.5;
  corr.entries(3, 3) = 0.5;
  const auto marginal = fock::partial_trace(corr, 0);
  CHECK_THAT(marginal.entries(0, 0).real(), WithinAbs(0.5, 1e-14));
  CHECK_THAT(marginal.entries(1, 1).real(), WithinAbs(0.5, 1e-14));

  CHECK_THROWS_AS(fock::partial_trace(rho, 0), std::invalid_argument);
}

TEST_CASE("von Neumann entropy", "[fock]") {
  CHECK_THAT(fock::von_neumann_entropy(fock::make_coherent_state(1.2, 30)),
             WithinAbs(0.0, 1e-9));

  DensityMatrix half{2, 1, fock::MatrixXcd::Zero(2, 2)};
  half.entries(0, 0) = 0.5;
  half.entries(1, 1) = 0.5;
  CHECK_THAT(fock::von_neumann_entropy(half),
             WithinAbs(shannon({0.5, 0.5}), 1e-14));

  DensityMatrix bad{2, 1, fock::MatrixXcd::Zero(2, 2)};
  bad.entries(0, 0) = 1.5;
  bad.entries(1, 1) = -0.5;
  CHECK_THROWS_AS(fock::von_neumann_entropy(bad), unphysical_error);
}

TEST_CASE("random density matrices", "[fock]") {
  const auto a = fock::random_density_matrix(8, 2.0, 42);
  const auto b = fock::random_density_matrix(8, 2.0, 42);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() == 0.0);

  const auto c = fock::random_density_matrix(8, 2.0, 43);
  CHECK((a.entries - c.entries).cwiseAbs().maxCoeff() > 1e-3);

  CHECK(fock::mean_photon_number(a) <= 2.0);
  CHECK_THAT(fock::trace_real(a.entries), WithinAbs(1.0, 1e-12));
  fock::validate(a);

  // tight caps actually bind
  const auto tight = fock::random_density_matrix(12, 0.5, 7);
  CHECK(fock::mean_photon_number(tight) <= 0.5);
  fock::validate(tight);
}

TEST_CASE("beamsplitter invariants", "[fock][invariants]") {
  // states supported well inside the truncation make the sector construction
  // exact, so these identities hold to machine precision
  const int dim = 12;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double lambda = 0.1 + 0.08 * static_cast<double>(seed);
    const auto small_rho = fock::random_density_matrix(5, 2.0, 100 + seed);
    const auto small_sigma = fock::random_density_matrix(5, 1.5, 200 + seed);
    const auto rho = fock::resized(small_rho, dim);
    const auto sigma = fock::resized(small_sigma, dim);

    SECTION("moment propagation, seed " + std::to_string(seed)) {
      // the lambda N + (1-lambda) N_E law requires a centered environment
      // (zero first moments), as for every named environment family; dephase
      // sigma to enforce that
      fock::DensityMatrix env = sigma;
      env.entries = sigma.entries.diagonal().asDiagonal();
      const auto out = fock::beamsplitter_reduced(rho, env, lambda);
      const double expected =
          lambda * fock::mean_photon_number(rho) +
          (1.0 - lambda) * fock::mean_photon_number(env);
      CHECK_THAT(fock::mean_photon_number(out), WithinAbs(expected, 1e-9));
    }

    SECTION("role swap symmetry, seed " + std::to_string(seed)) {
      const auto out_a = fock::beamsplitter_reduced(rho, sigma, lambda);
      const auto out_b = fock::beamsplitter_reduced(sigma, rho, 1.0 - lambda);
      CHECK(fock::trace_distance(out_a, out_b) < 1e-9);
    }
  }

  SECTION("entropy invariance under unitary conjugation") {
    const auto rho = fock::random_density_matrix(16, 2.0, 300);
    const auto u = fock::displacement_operator(complexd(0.9, 0.3), 16);
    CHECK_THAT(fock::von_neumann_entropy(fock::apply_unitary(u, rho)),
               WithinAbs(fock::von_neumann_entropy(rho), 1e-9));
  }

  SECTION("sector path agrees with the materialized unitary") {
    const int d = 8;
    const auto rho = fock::random_density_matrix(d, 2.0, 400);
    const auto sigma = fock::random_density_matrix(d, 1.0, 401);
    const auto via_sectors = fock::beamsplitter_reduced(rho, sigma, 0.6);
    const auto via_full = fock::partial_trace(
        fock::apply_unitary(fock::beamsplitter_unitary(0.6, d),
                            fock::tensor_product(rho, sigma)),
        0);
    CHECK(fock::trace_distance(via_sectors, via_full) < 1e-12);
  }
}

TEST_CASE("resized guards the discarded mass", "[fock]") {
  const auto th = fock::make_thermal_state(2.0, 40);
  CHECK_THROWS_AS(fock::resized(th, 6), truncation_error);
  const auto padded = fock::resized(th, 50);
  CHECK(padded.dim == 50);
  CHECK_THAT(fock::trace_real(padded.entries), WithinAbs(1.0, 1e-14));
}
