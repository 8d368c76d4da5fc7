// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>

#include "adscharge/errors.hpp"
#include "adscharge/models.hpp"
#include "doctest.h"

using namespace adscharge;

TEST_SUITE("models") {

TEST_CASE("vacuum profile is the identity reparametrization") {
  const RnAdsProfile p(3, 0.0, 0.0);
  CHECK(p.regime() == "vacuum");
  for (double r : {0.5, 2.0, 7.0}) {
    const auto s = p.at(r);
    CHECK(s.s == doctest::Approx(std::sinh(r)).epsilon(1e-15));
    CHECK(s.area_deficit == 0.0);
  }
}

TEST_CASE("horizon is the largest zero of U") {
  for (int n : {3, 4, 5}) {
    const RnAdsProfile p(n, 0.5, 0.2);
    CHECK(p.regime() == "black_hole");
    const double sh = p.horizon();
    CHECK(std::abs(p.U(sh)) <= 1e-12);
    // U > 0 just outside and on a coarse scan beyond.
    for (double s = sh * 1.001; s < 10.0; s *= 1.3) {
      CHECK(p.U(s) > 0.0);
    }
  }
}

TEST_CASE("profile satisfies ds/dr = sqrt(U) and the closed derivatives") {
  for (int n : {3, 4}) {
    const RnAdsProfile p(n, 0.5, 0.3);
    for (double r : {1.0, 3.0, 6.0}) {
      CAPTURE(r);
      const double h = 1e-4;
      const auto a = p.at(r);
      const auto ap = p.at(r + h);
      const auto am = p.at(r - h);
      const double dsdr = (ap.s - am.s) / (2 * h);
      CHECK(dsdr == doctest::Approx(std::sqrt(p.U(a.s))).epsilon(1e-7));
      CHECK(a.sqrt_u == doctest::Approx(std::sqrt(p.U(a.s))).epsilon(1e-13));
      CHECK(a.area_deficit == doctest::Approx(a.s * a.s - std::pow(std::sinh(r), 2))
                                  .epsilon(1e-8).scale(1e-3 * a.s * a.s));
      const double da = (ap.area_deficit - am.area_deficit) / (2 * h);
      CHECK(a.area_deficit_d == doctest::Approx(da).epsilon(1e-6));
      const double dda = (ap.area_deficit_d - am.area_deficit_d) / (2 * h);
      CHECK(a.area_deficit_dd == doctest::Approx(dda).epsilon(1e-6));
      CHECK(a.field == doctest::Approx(0.3 / std::pow(a.s, n - 1)).epsilon(1e-14));
      const double df = (ap.field - am.field) / (2 * h);
      CHECK(a.field_d == doctest::Approx(df).epsilon(1e-6));
    }
  }
}

TEST_CASE("s / sinh(r) tends to one") {
  const RnAdsProfile p(3, 0.5, 0.2);
  CHECK(p.at(12.0).s / std::sinh(12.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("model-domain errors") {
  CHECK_THROWS_AS(RnAdsProfile(3, -0.1, 0.0), ModelDomainError);
  CHECK_THROWS_AS(RnAdsProfile(2, 0.1, 0.0), InvalidDimensionError);
  const Chart inner = Chart::make(3, {0.05, 1.0, 2.0, 3.0}, 10);
  CHECK_THROWS_AS(rn_ads_data(inner, 0.5, 0.2), ModelDomainError);
  CHECK_THROWS_AS(perturbed_data(default_model_chart(3), 1.4, 0.1, 1), ModelDomainError);
  PerturbationOptions po;
  po.profile = "conformal";
  CHECK_THROWS_AS(perturbed_data(default_model_chart(3), 3, -2.0, 1, po), ModelDomainError);
}

TEST_CASE("naked singularity regime is flagged incomplete") {
  const RnAdsProfile p(3, 0.1, 0.5);
  CHECK(p.regime() == "naked_singularity");
  CHECK_FALSE(p.complete());
}

TEST_CASE("declared decay rates") {
  CHECK(schwarzschild_ads_data(default_model_chart(3), 0.5).tau == 3.0);
  CHECK(rn_ads_data(default_model_chart(4), 0.5, 0.1).tau == 3.0);
  CHECK(hyperbolic_data(4).tau == 4.0);
  CHECK(maxwell_constant(3) == doctest::Approx(1.0));
}

TEST_CASE("perturbations are seeded") {
  const Chart chart = Chart::make(3, geometric_ladder(2.0, 4.0, 4), 10);
  const Point y = (Point(3) << 1.0, 2.0, 0.5).finished();
  const InitialData a = perturbed_data(chart, 3.0, 0.1, 42);
  const InitialData b = perturbed_data(chart, 3.0, 0.1, 42);
  const InitialData c = perturbed_data(chart, 3.0, 0.1, 43);
  CHECK(a.e->value(y).data() == b.e->value(y).data());
  CHECK(a.e->value(y).data() != c.e->value(y).data());
  CHECK(a.K->value(y).max_abs() > 0.0);
}

TEST_CASE("make_model dispatches on the family") {
  ModelSpec spec;
  spec.family = "rn_ads";
  spec.mbar = 0.5;
  spec.qbar = 0.2;
  const InitialData d = make_model(spec, default_model_chart(3));
  CHECK(d.label == "rn_ads");
  spec.family = "nope";
  CHECK_THROWS(make_model(spec, default_model_chart(3)));
}

}  // TEST_SUITE
