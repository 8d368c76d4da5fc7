// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <random>

#include "adscharge/clifford.hpp"
#include "adscharge/errors.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

Spinor random_spinor(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Spinor u(d);
  for (int a = 0; a < d; ++a) {
    u(a) = Complex(g(rng), g(rng));
  }
  return u.normalized();
}

Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = scale * g(rng);
  }
  return v;
}

}  // namespace

TEST_SUITE("clifford") {

TEST_CASE("defining identities hold exactly for n = 3..8") {
  for (int n = 3; n <= 8; ++n) {
    CAPTURE(n);
    const CliffordRep rep = build_rep(n);
    CHECK(static_cast<int>(rep.gammas.size()) == n);
    CHECK(clifford_defects(rep).max() <= 1e-14);
    // Dimensions: 2^{n/2} for even n, doubled 2^{(n+1)/2} for odd n.
    const int expected = n % 2 == 0 ? 1 << (n / 2) : 1 << ((n + 1) / 2);
    CHECK(rep.dim_spinor == expected);
    CHECK(rep.doubled == (n % 2 == 1));
  }
}

TEST_CASE("anticommutator checked independently of the defect report") {
  const CliffordRep rep = build_rep(7);
  const int d = rep.dim_spinor;
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const CMat ac = rep.gammas[i] * rep.gammas[j] + rep.gammas[j] * rep.gammas[i];
      const CMat expected = (i == j ? -2.0 : 0.0) * CMat::Identity(d, d);
      CHECK((ac - expected).norm() <= 1e-14);
    }
    const CMat mixed = rep.gammas[i] * rep.chirality + rep.chirality * rep.gammas[i];
    CHECK(mixed.norm() <= 1e-14);
  }
}

TEST_CASE("clifford_mul squares to minus the norm") {
  std::mt19937_64 rng(3);
  for (int n : {3, 4, 6}) {
    const CliffordRep rep = build_rep(n);
    const Vec x = random_vec(n, rng);
    const Spinor phi = random_spinor(rep.dim_spinor, rng);
    const Spinor twice = clifford_mul(rep, x, clifford_mul(rep, x, phi));
    CHECK((twice + x.squaredNorm() * phi).norm() <= 1e-13);
  }
}

TEST_CASE("conjugated module keeps the identities") {
  std::mt19937_64 rng(11);
  const CliffordRep rep = build_rep(5);
  const int d = rep.dim_spinor;
  CMat a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      a(i, j) = Complex(std::normal_distribution<double>()(rng),
                        std::normal_distribution<double>()(rng));
    }
  }
  const Eigen::HouseholderQR<CMat> qr(a);
  const CMat u = qr.householderQ();
  CHECK(clifford_defects(rep.conjugated(u)).max() <= 1e-13);
}

TEST_CASE("curvature endomorphism spectrum bound is attained") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int n : {3, 4, 5}) {
    const CliffordRep rep = build_rep(n);
    for (int k = 0; k < 20; ++k) {
      const double mu = unif(rng);
      const double varpi = unif(rng);
      const Vec j = random_vec(n, rng);
      const CMat m = curvature_endomorphism_matrix(rep, mu, varpi, j);
      CHECK((m - m.adjoint()).norm() <= 1e-13);
      const Eigen::SelfAdjointEigenSolver<CMat> es(m);
      const double lowest = es.eigenvalues().minCoeff();
      // Oracle: (mu + n(n-1)/2 - sqrt(|J|^2 + varpi^2)) / 2.
      const double oracle =
          0.5 * (mu + 0.5 * n * (n - 1) - std::sqrt(j.squaredNorm() + varpi * varpi));
      CHECK(lowest == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(curvature_endomorphism_lower_bound(n, mu, varpi, j) ==
            doctest::Approx(oracle).epsilon(1e-14));
      const Spinor phi = random_spinor(rep.dim_spinor, rng);
      CHECK((curvature_endomorphism(rep, mu, varpi, j, phi) - m * phi).norm() <= 1e-13);
    }
  }
}

TEST_CASE("boundary projections split and swap under chirality") {
  std::mt19937_64 rng(7);
  for (int n : {3, 4, 5, 6, 7, 8}) {
    const CliffordRep rep = build_rep(n);
    for (int k = 0; k < 100; ++k) {
      const Vec nu = random_vec(n, rng).normalized();
      const Spinor phi = random_spinor(rep.dim_spinor, rng);
      const auto [pp, pm] = boundary_projections(rep, nu, phi);
      CHECK((pp + pm - phi).norm() <= 1e-12);
      CHECK(std::abs(pp.dot(pm)) <= 1e-12);
      const auto [gp, gm] = boundary_projections(rep, nu, rep.chirality * phi);
      CHECK((rep.chirality * pp - gm).norm() <= 1e-12);
      CHECK((rep.chirality * pm - gp).norm() <= 1e-12);
    }
  }
}

TEST_CASE("construction tag is stable and dimension errors are raised") {
  CHECK(clifford_construction_tag() == build_rep(4).construction);
  CHECK_THROWS_AS(build_rep(0), InvalidDimensionError);
}

}  // TEST_SUITE
