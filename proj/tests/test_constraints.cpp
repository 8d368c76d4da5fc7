// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>
#include <random>

#include "adscharge/constraints.hpp"
#include "adscharge/models.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

Chart short_chart(int n) { return Chart::make(n, geometric_ladder(2.0, 4.0, 4), 2 * n + 4); }

Point sample_point(int n, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Point y(n);
  for (int i = 0; i < n; ++i) y(i) = g(rng);
  return r * y.normalized();
}

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("hyperbolic space satisfies the vacuum constraints") {
  for (int n : {3, 4, 5}) {
    const InitialData d = hyperbolic_data(short_chart(n));
    const ConstraintValues c = constraint_map(d, sample_point(n, 1.7, n));
    CHECK(std::abs(c.phi1_shifted) <= 1e-10);
    CHECK(c.phi1 == doctest::Approx(-n * (n - 1.0)).epsilon(1e-12));
    CHECK(c.phi2.norm() <= 1e-10);
    CHECK(std::abs(c.phi3) <= 1e-12);
  }
}

TEST_CASE("conformal data: scalar curvature against the conformal-change formula") {
  // g = u^{4/(n-2)} b, u = 1 + eps W^{-n}, Delta_b W^{-n} = n W^{-n} - n(n+1) W^{-n-2}:
  // R_g = u^{-(n+2)/(n-2)} (-4 (n-1)/(n-2) Delta_b u - n(n-1) u).
  for (int n : {3, 4}) {
    const double eps = 0.2;
    const double beta = 0.4;
    PerturbationOptions po;
    po.profile = "conformal";
    po.beta = beta;
    const InitialData d = perturbed_data(short_chart(n), n, eps, 9, po);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const Point y = sample_point(n, 0.8 + 0.6 * s, 40 + s);
      // Recover W from the metric: g_rr = u^{4/(n-2)}.
      const double r = y.norm();
      const Vec xh = y / r;
      const double grr = xh.dot(d.g(y) * xh);
      const double u = std::pow(grr, (n - 2) / 4.0);
      const double w = std::pow((u - 1.0) / eps, -1.0 / n);
      const double lap = eps * (n * std::pow(w, -n) - n * (n + 1.0) * std::pow(w, -n - 2));
      const double rg = std::pow(u, -(n + 2.0) / (n - 2)) *
                        (-4.0 * (n - 1) / (n - 2) * lap - n * (n - 1.0) * u);
      const ConstraintValues c = constraint_map(d, y);
      CHECK(c.phi1_shifted == doctest::Approx(rg + n * (n - 1.0)).epsilon(1e-7));
      CHECK(c.phi1_shifted > 0.0);
    }
  }
}

TEST_CASE("RN-AdS is electrovacuum") {
  for (int n : {3, 4}) {
    const InitialData d = rn_ads_data(Chart::make(n, geometric_ladder(1.5, 4.0, 4), 2 * n + 4), 0.5, 0.3);
    for (double r : {1.5, 2.5, 4.0}) {
      const Point y = sample_point(n, r, 70 + n);
      const ConstraintValues c = constraint_map(d, y);
      const Vec e = d.E->value(y).as_vec();
      const double e2 = e.dot(d.g(y) * e);
      CHECK(e2 > 0.0);
      // div_g E = 0 and R + n(n-1) = (n-1)(n-2)|E|^2, i.e. phi1_shifted = 0.
      CHECK(std::abs(c.phi3) <= 1e-9);
      CHECK(std::abs(c.phi1_shifted) <= 1e-8 * (n - 1) * (n - 2) * e2 + 1e-10);
      CHECK(c.phi2.norm() <= 1e-12);
      const Densities dd = densities(d, y);
      CHECK(std::abs(dec_margin(dd)) <= 1e-8);
    }
  }
}

TEST_CASE("DEC verdicts follow the sign of the conformal amplitude") {
  PerturbationOptions po;
  po.profile = "conformal";
  po.beta = 0.3;
  const Chart chart = short_chart(3);
  DecOptions o;
  o.samples = {sample_point(3, 2.0, 1), sample_point(3, 3.0, 2), sample_point(3, 1.0, 3)};
  CHECK(dec_check(perturbed_data(chart, 3, 0.1, 1, po), o).verdict == Verdict::Pass);
  const DecReport bad = dec_check(perturbed_data(chart, 3, -0.1, 1, po), o);
  CHECK(bad.verdict == Verdict::Fail);
  CHECK(bad.min_margin < 0.0);
  CHECK(bad.samples == 3);
}

TEST_CASE("DEC on the hyperbolic chart nodes") {
  const DecReport rep = dec_check(hyperbolic_data(short_chart(3)));
  CHECK(rep.verdict == Verdict::Pass);
  CHECK(std::abs(rep.min_margin) <= 1e-10);
  CHECK(std::abs(rep.max_margin) <= 1e-10);
  CHECK(rep.samples == 4 * make_sphere_rule(3, 10).size());
}

TEST_CASE("constraint pairing vanishes on constraint solutions") {
  const InitialData d = rn_ads_data(short_chart(3), 0.4, 0.2);
  const Point y = sample_point(3, 2.2, 5);
  for (int mu = 0; mu <= 3; ++mu) {
    CHECK(std::abs(constraint_pairing(d, potential_kid(3, mu), y)) <= 1e-7);
  }
}

TEST_CASE("integrability of the charge density on decaying data") {
  const InitialData d = schwarzschild_ads_data(Chart::make(3, geometric_ladder(2.0, 8.0, 6), 10), 0.5);
  const IntegrabilityReport rep = integrability_check(d, potential_kid(3, 0));
  CHECK(rep.verdict != Verdict::Fail);
}

}  // TEST_SUITE
