// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>
#include <numbers>
#include <random>

#include "adscharge/boundary.hpp"
#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "adscharge/models.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

InitialData hyperbolic_with_inner(int n, double rho) {
  return hyperbolic_data(Chart::make(n, geometric_ladder(rho, rho + 6.0, 4), 2 * n + 4));
}

BoundaryOptions round_options() {
  BoundaryOptions o;
  o.round_class = true;
  return o;
}

}  // namespace

TEST_SUITE("boundary") {

TEST_CASE("geodesic spheres in hyperbolic space are equality cases") {
  for (int n : {3, 4}) {
    for (double rho : {0.5, 1.0, 2.0}) {
      CAPTURE(n);
      CAPTURE(rho);
      const BoundaryData bd = level_set_boundary(hyperbolic_with_inner(n, rho), rho, round_options());
      // Oracle: H = (n-1) coth(rho), Vol = omega sinh^{n-1}(rho).
      CHECK(bd.vol == doctest::Approx(sphere_area(n) * std::pow(std::sinh(rho), n - 1)).epsilon(1e-12));
      CHECK(bd.nodes[0].H == doctest::Approx((n - 1) / std::tanh(rho)).epsilon(1e-10));
      const AdmissibilityReport rep = admissibility(bd, AdmissibilityMode::YamabeB);
      CHECK(std::abs(rep.margin) <= 1e-8);
      CHECK(rep.verdict == Verdict::Pass);
      CHECK(*rep.dirac_gap <= 1e-12);
      if (n == 3) {
        CHECK(*rep.reduction_gap <= 1e-12);
      }
    }
  }
}

TEST_CASE("RN-AdS coordinate spheres against the closed form") {
  // Round sphere of area radius s: H = (n-1) sqrt(U)/s, E_nu = q / s^{n-1}, so
  // margin = sqrt(1 + s^2)/s - sqrt(U)/s - |q| / s^{n-1}.
  for (int n : {3, 4}) {
    const double m = 0.5, q = 0.2;
    const RnAdsProfile prof(n, m, q);
    for (double rho : {1.0, 2.0}) {
      CAPTURE(n);
      CAPTURE(rho);
      const InitialData d = rn_ads_data(Chart::make(n, geometric_ladder(rho, rho + 5.0, 4), 2 * n + 4), m, q);
      const BoundaryData bd = level_set_boundary(d, rho, round_options());
      const double s = std::pow(bd.vol / sphere_area(n), 1.0 / (n - 1));
      const double oracle = std::sqrt(1.0 + s * s) / s - std::sqrt(prof.U(s)) / s -
                            std::abs(q) / std::pow(s, n - 1);
      const AdmissibilityReport rep = admissibility(bd, AdmissibilityMode::YamabeB);
      CHECK(rep.margin == doctest::Approx(oracle).epsilon(1e-8).scale(1e-3));
      const AdmissibilityReport ts = admissibility(bd, AdmissibilityMode::TsB);
      CHECK(ts.margin == doctest::Approx(oracle).epsilon(1e-8).scale(1e-3));
    }
  }
  // n = 3: the sign of the margin flips between rho = 1 and rho = 2.
  const InitialData d1 = rn_ads_data(Chart::make(3, {1.0, 2.0, 3.0, 4.0}, 10), 0.5, 0.2);
  CHECK(admissibility(level_set_boundary(d1, 1.0, round_options()), AdmissibilityMode::YamabeB).verdict == Verdict::Pass);
  CHECK(admissibility(level_set_boundary(d1, 2.0, round_options()), AdmissibilityMode::YamabeB).verdict == Verdict::Fail);
}

TEST_CASE("area variation matches the mean curvature") {
  const InitialData d = rn_ads_data(Chart::make(3, {1.5, 2.5, 3.5, 4.5}, 10), 0.5, 0.2);
  const AreaVariationCheck c = area_variation_check(d, 1.5);
  CHECK(c.relative_gap <= 1e-8);
}

TEST_CASE("untrapped round spheres and expansions") {
  const BoundaryData bd = level_set_boundary(hyperbolic_with_inner(3, 1.0), 1.0, round_options());
  const Expansions ex = null_expansions(bd);
  CHECK_FALSE(ex.future_trapped);
  CHECK_FALSE(ex.past_trapped);
  CHECK(ex.theta_plus[0] == doctest::Approx(2.0 / std::tanh(1.0)).epsilon(1e-10));
  CHECK(admissibility(bd, AdmissibilityMode::TrappedA).verdict == Verdict::Fail);
  CHECK(admissibility(bd, AdmissibilityMode::TsA).verdict == Verdict::Fail);
}

TEST_CASE("supplied trapped surface passes trapped_a") {
  BoundaryData bd;
  bd.n = 3;
  bd.component = "inner";
  bd.vol = 1.0;
  for (int k = 0; k < 3; ++k) {
    Vec nu = Vec::Zero(3);
    nu(k) = 1.0;
    bd.nodes.push_back(boundary_node(nu, 0.5, -2.0, Vec::Zero(3), 0.0, 1.0 / 3.0));
  }
  const AdmissibilityReport rep = admissibility(bd, AdmissibilityMode::TrappedA);
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(rep.margin == doctest::Approx(1.5));
  CHECK_THROWS_AS(admissibility(bd, AdmissibilityMode::YamabeB), HypothesisError);
  CHECK_THROWS_AS(admissibility(bd, AdmissibilityMode::TsB), HypothesisError);
}

TEST_CASE("boundary endomorphism spectrum is H +- sqrt(trK^2 + |k|^2 + ((n-1)E_nu)^2)") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int n : {3, 4, 5}) {
    const CliffordRep rep = build_rep(n);
    for (int t = 0; t < 20; ++t) {
      BoundaryPointValues v;
      v.nu = Vec::NullaryExpr(n, [&] { return g(rng); }).normalized();
      Vec k = Vec::NullaryExpr(n, [&] { return g(rng); });
      v.k_tangential = k - k.dot(v.nu) * v.nu;
      v.H = g(rng);
      v.tr_K = g(rng);
      v.E_nu = g(rng);
      const CMat h = h_endomorphism_matrix(rep, v);
      CHECK((h - h.adjoint()).norm() <= 1e-13);
      const auto ev = Eigen::SelfAdjointEigenSolver<CMat>(h).eigenvalues();
      const double root = std::sqrt(v.tr_K * v.tr_K + v.k_tangential.squaredNorm() +
                                    std::pow((n - 1) * v.E_nu, 2));
      CHECK(ev.maxCoeff() == doctest::Approx(v.H + root).epsilon(1e-12));
      CHECK(ev.minCoeff() == doctest::Approx(v.H - root).epsilon(1e-12));
      CHECK(h_max(n, v.H, v.tr_K, v.k_tangential.norm(), v.E_nu) ==
            doctest::Approx(v.H + root).epsilon(1e-14));
    }
  }
}

TEST_CASE("reduced quadratic form identity") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int n : {3, 4, 5, 6}) {
    const CliffordRep rep = build_rep(n);
    for (int t = 0; t < 100; ++t) {
      BoundaryPointValues v;
      v.nu = Vec::NullaryExpr(n, [&] { return g(rng); }).normalized();
      v.k_tangential = Vec::Zero(n);
      v.H = g(rng);
      v.tr_K = g(rng);
      Spinor phi(rep.dim_spinor);
      for (int a = 0; a < rep.dim_spinor; ++a) phi(a) = Complex(g(rng), g(rng));
      phi.normalize();
      const auto [pp, pm] = boundary_projections(rep, v.nu, phi);
      const double theta_p = v.H + v.tr_K;
      const double theta_m = v.H - v.tr_K;
      CHECK(std::abs(h_endomorphism_form(rep, v, phi) -
                     (theta_p * pp.squaredNorm() + theta_m * pm.squaredNorm())) <= 1e-12);
    }
  }
}

TEST_CASE("Yamabe constants") {
  CHECK(round_yamabe(3) == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-14));
  CHECK(dirac_bound_rhs(3, round_yamabe(3), 4.0 * std::numbers::pi) ==
        doctest::Approx(0.5 * 8.0 * std::numbers::pi / (4.0 * std::numbers::pi) + 1.0));
}

TEST_CASE("mode names") {
  for (auto m : {AdmissibilityMode::TrappedA, AdmissibilityMode::YamabeB,
                 AdmissibilityMode::TsA, AdmissibilityMode::TsB}) {
    CHECK(parse_admissibility_mode(to_string(m)) == m);
  }
  CHECK_THROWS_AS(parse_admissibility_mode("c"), ConfigError);
}

}  // TEST_SUITE
