// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>
#include <numbers>
#include <random>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

// Exact integral of x^alpha over S^{n-1}: 2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2).
double monomial_integral(const std::vector<int>& alpha) {
  double num = 2.0;
  double s = 0.0;
  for (int a : alpha) {
    if (a % 2) {
      return 0.0;
    }
    num *= std::tgamma(0.5 * (a + 1));
    s += 0.5 * (a + 1);
  }
  return num / std::tgamma(s);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("sphere areas") {
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_area(5) == doctest::Approx(8.0 * std::numbers::pi * std::numbers::pi / 3.0).epsilon(1e-15));
}

TEST_CASE("sinh ratio and its derivatives across the series switch") {
  for (double r : {1e-9, 1e-4, 0.01, 0.3, 2.0, 9.0}) {
    CAPTURE(r);
    CHECK(sinh_ratio(r) == doctest::Approx(std::sinh(r) / r).epsilon(1e-14));
    const double h = 1e-5 * std::max(r, 1e-2);
    const double fd1 = (sinh_ratio(r + h) - sinh_ratio(r - h)) / (2 * h);
    CHECK(sinh_ratio_d1(r) == doctest::Approx(fd1).epsilon(1e-7).scale(1.0));
    const double fd2 = (sinh_ratio_d1(r + h) - sinh_ratio_d1(r - h)) / (2 * h);
    CHECK(sinh_ratio_d2(r) == doctest::Approx(fd2).epsilon(1e-7).scale(1.0));
  }
  CHECK(sinh_ratio(0.0) == 1.0);
}

TEST_CASE("sphere rule integrates monomials exactly") {
  for (int n : {3, 4}) {
    for (int degree : {4, 7, 10}) {
      const SphereRule rule = make_sphere_rule(n, degree);
      std::vector<int> alpha(n, 0);
      std::mt19937_64 rng(static_cast<std::uint64_t>(10 * n + degree));
      for (int trial = 0; trial < 40; ++trial) {
        int left = degree;
        for (int i = 0; i < n; ++i) {
          alpha[i] = std::uniform_int_distribution<int>(0, left)(rng);
          left -= alpha[i];
        }
        double q = 0.0;
        for (std::size_t a = 0; a < rule.size(); ++a) {
          double v = rule.weights[a];
          for (int i = 0; i < n; ++i) {
            v *= std::pow(rule.nodes[a](i), alpha[i]);
          }
          q += v;
        }
        CHECK(q == doctest::Approx(monomial_integral(alpha)).scale(1.0).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("node counts of the default rules") {
  CHECK(make_sphere_rule(3, default_sphere_degree(3)).size() == 66);
  CHECK(make_sphere_rule(4, default_sphere_degree(4)).size() == 637);
}

TEST_CASE("Gauss-Gegenbauer against the Legendre case") {
  std::vector<double> x, w;
  gauss_gegenbauer(3, 0.5, x, w);
  // lambda = 1/2 is Gauss-Legendre: nodes 0, +-sqrt(3/5), weights 8/9, 5/9.
  std::sort(x.begin(), x.end());
  CHECK(x[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  double s = 0.0;
  for (double v : w) s += v;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("geometric ladder") {
  const auto r = geometric_ladder(5.0, 11.0, 6);
  REQUIRE(r.size() == 6);
  CHECK(r.front() == 5.0);
  CHECK(r.back() == doctest::Approx(11.0).epsilon(1e-15));
  CHECK(r[2] / r[1] == doctest::Approx(r[1] / r[0]).epsilon(1e-14));
}

TEST_CASE("background metric is hyperbolic in polar form") {
  const Point y = (Point(3) << 0.3, -1.2, 0.8).finished();
  const double r = y.norm();
  const Mat b = background_metric(y);
  const Vec u = y / r;
  CHECK(u.dot(b * u) == doctest::Approx(1.0).epsilon(1e-14));
  Vec t(3);
  t << 1.2, 0.3, 0.0;
  t.normalize();
  const double s = std::sinh(r) / r;
  CHECK(t.dot(b * t) == doctest::Approx(s * s).epsilon(1e-14));
  CHECK((background_inverse(y) * b - Mat::Identity(3, 3)).norm() <= 1e-13);
  const Mat f = frame_map(y);
  CHECK((f * f - b).norm() <= 1e-13);
  CHECK((inverse_frame_map(y) * f - Mat::Identity(3, 3)).norm() <= 1e-13);
}

TEST_CASE("Christoffel symbols from an independent difference of b") {
  const Point y = (Point(4) << 0.7, -0.4, 1.1, 0.2).finished();
  const int n = 4;
  const double h = 1e-5;
  std::vector<Mat> db(n);
  for (int k = 0; k < n; ++k) {
    Point p = y, m = y;
    p(k) += h;
    m(k) -= h;
    db[k] = (background_metric(p) - background_metric(m)) / (2 * h);
  }
  const Mat bi = background_inverse(y);
  const Tensor gam = background_christoffel(y);
  const Tensor dbm = background_metric_derivative(y);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        CHECK(dbm(i, j, k) == doctest::Approx(db[k](i, j)).scale(1.0).epsilon(1e-8));
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += 0.5 * bi(k, l) * (db[j](l, i) + db[i](l, j) - db[l](i, j));
        }
        CHECK(gam(k, i, j) == doctest::Approx(s).scale(1.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("scalar curvature of the background is -n(n-1)") {
  for (int n : {3, 4, 5}) {
    Point y = Point::Constant(n, 0.4);
    y(0) = 1.3;
    CHECK(scalar_curvature(*background_metric_field(n), y) ==
          doctest::Approx(-n * (n - 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("covariant derivative of b vanishes") {
  const Point y = (Point(3) << 1.0, 2.0, -0.5).finished();
  const Tensor d = covariant_derivative_b(*background_metric_field(3), y);
  CHECK(d.max_abs() <= 1e-10);
}

TEST_CASE("sphere integral of a constant is the area of S_r") {
  const SphereRule rule = make_sphere_rule(3, 8);
  const double r = 2.0;
  const double v = sphere_integrate(rule, r, [](const Vec&) { return 1.0; });
  CHECK(v == doctest::Approx(4.0 * std::numbers::pi * std::pow(std::sinh(r), 2)).epsilon(1e-13));
}

TEST_CASE("pairwise summation is order-fixed and accurate") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("chart validation") {
  CHECK_THROWS(Chart::make(3, {2.0, 1.0}, 6).validate());
  CHECK_THROWS(chart_radius(Point::Zero(3)));
}

}  // TEST_SUITE
