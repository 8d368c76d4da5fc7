// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>
#include <random>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "adscharge/kids.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

Spinor random_spinor(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Spinor u(d);
  for (int a = 0; a < d; ++a) u(a) = Complex(g(rng), g(rng));
  return u.normalized();
}

}  // namespace

TEST_SUITE("kids") {

TEST_CASE("static potentials in polar and ball form agree") {
  const Point y = (Point(3) << 0.4, -1.0, 0.7).finished();
  const double r = y.norm();
  CHECK(static_potential(0, y, PotentialModel::Polar) == doctest::Approx(std::cosh(r)));
  CHECK(static_potential(2, y, PotentialModel::Polar) ==
        doctest::Approx(std::sinh(r) * y(1) / r));
  const Point x = ball_point(y);
  CHECK(x.norm() == doctest::Approx(std::tanh(0.5 * r)).epsilon(1e-14));
  for (int mu = 0; mu <= 3; ++mu) {
    CHECK(static_potential(mu, x, PotentialModel::Ball) ==
          doctest::Approx(static_potential(mu, y, PotentialModel::Polar)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(static_potential(0, Point::Constant(3, 1.0), PotentialModel::Ball),
                  DomainError);
}

TEST_CASE("potentials satisfy Hess V = V b") {
  for (int n : {3, 4, 5}) {
    const auto pts = kid_sample_points(n, 10, 1);
    for (int mu = 0; mu <= n; ++mu) {
      CHECK(adjoint_kernel_residual(potential_kid(n, mu), pts).max() <= 1e-7);
    }
    // |dV_0|^2 = V_0^2 - 1 (unit timelike static potential).
    const Point& y = pts[3];
    const double v = static_potential(0, y, PotentialModel::Polar);
    const Vec dv = static_potential_gradient(0, y);
    CHECK(dv.dot(background_inverse(y) * dv) == doctest::Approx(v * v - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("Killing basis has n(n+1)/2 members with small residuals") {
  for (int n : {3, 4, 5}) {
    const auto basis = killing_field_basis(n);
    CHECK(static_cast<int>(basis.size()) == n * (n + 1) / 2);
    const auto pts = kid_sample_points(n, 10, 2);
    for (const Kid& k : basis) {
      CAPTURE(k.label);
      CHECK(adjoint_kernel_residual(k, pts).max() <= 1e-7);
    }
  }
}

TEST_CASE("closed-form Killing 1-forms match V_0 dV_j - V_j dV_0") {
  const int n = 3;
  const auto basis = killing_field_basis(n);
  const Point y = (Point(3) << 3.0, -4.0, 5.5).finished();
  for (const Kid& k : basis) {
    if (k.label != "boost_02") continue;
    const Vec expected = static_potential(0, y, PotentialModel::Polar) * static_potential_gradient(2, y) -
                         static_potential(2, y, PotentialModel::Polar) * static_potential_gradient(0, y);
    const Vec got = k.alpha->value(y).as_vec();
    CHECK((got - expected).norm() <= 1e-9 * expected.norm());
  }
}

TEST_CASE("spinor KIDs and Killing spinors") {
  for (int n : {3, 4, 5}) {
    const CliffordRep rep = build_rep(n);
    std::mt19937_64 rng(100 + n);
    const auto pts = kid_sample_points(n, 8, 3);
    for (int k = 0; k < 10; ++k) {
      const Spinor u = random_spinor(rep.dim_spinor, rng);
      const Kid kid = kid_from_spinor(rep, u);
      CHECK(kid.provenance == KidProvenance::Spinor);
      CHECK(adjoint_kernel_residual(kid, pts).max() <= 1e-7);
      const Point x = ball_point(pts[k % pts.size()]);
      CHECK(killing_spinor_residual(rep, u, x, +1) <= 1e-6);
      CHECK(killing_spinor_residual(rep, u, x, -1) <= 1e-6);
      // The lapse of a Killing spinor KID is |zeta|^2 > 0.
      CHECK(kid.V->value(pts[0]).as_scalar() > 0.0);
    }
  }
}

TEST_CASE("a wrong spinor field has a visible residual") {
  const CliffordRep rep = build_rep(3);
  const Spinor u = Spinor::Unit(rep.dim_spinor, 0);
  auto constant = [&](const Point&) { return Spinor(u); };
  const Point x = (Point(3) << 0.2, 0.1, -0.3).finished();
  CHECK(spinor_field_residual(rep, constant, x) > 1e-2);
}

TEST_CASE("combine is linear in every component") {
  const Kid a = potential_kid(3, 1);
  const Kid b = killing_field_basis(3)[0];
  const Kid c = combine(2.0, a, -0.5, b);
  const Point y = (Point(3) << 1.0, 0.5, -0.2).finished();
  CHECK(c.V->value(y).as_scalar() == doctest::Approx(2.0 * a.V->value(y).as_scalar()));
  CHECK((c.alpha->value(y).as_vec() + 0.5 * b.alpha->value(y).as_vec()).norm() <= 1e-14);
}

TEST_CASE("causal classes in the Minkowski inner product") {
  CHECK(eta_inner((Vec(3) << 2, 1, 0).finished(), (Vec(3) << 2, 1, 0).finished()) ==
        doctest::Approx(3.0));
  CHECK(causal_class((Vec(3) << 2, 1, 0).finished()) == CausalClass::TimelikeFuture);
  CHECK(causal_class((Vec(3) << -2, 1, 0).finished()) == CausalClass::TimelikePast);
  CHECK(causal_class((Vec(3) << 1, 1, 0).finished()) == CausalClass::Null);
  CHECK(causal_class((Vec(3) << 1, 2, 0).finished()) == CausalClass::Spacelike);
  CHECK(is_causal_future((Vec(3) << 1, 0, 1).finished()));
  CHECK(is_causal_future(Vec::Zero(3)));
  CHECK_FALSE(is_causal_future((Vec(3) << -1, 0, 0.5).finished()));
}

}  // TEST_SUITE
