// Distributed under the MIT License.
// See LICENSE.txt for details.

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "adscharge/charges.hpp"
#include "adscharge/errors.hpp"
#include "adscharge/grid_io.hpp"
#include "adscharge/models.hpp"
#include "doctest.h"

using namespace adscharge;

namespace {

std::vector<double> uniform_radii(double lo, double hi, double h) {
  std::vector<double> r;
  for (int k = 0; lo + k * h <= hi + 1e-12; ++k) r.push_back(lo + k * h);
  return r;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("Fornberg weights reproduce the classical stencils") {
  const double h = 0.1;
  const std::vector<double> xs = {-2 * h, -h, 0.0, h, 2 * h};
  const auto w1 = fornberg_weights(0.0, xs, 1);
  const double c1[] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
  for (int k = 0; k < 5; ++k) CHECK(w1[k] * h == doctest::Approx(c1[k]).scale(1.0).epsilon(1e-13));
  const auto w2 = fornberg_weights(0.0, xs, 2);
  const double c2[] = {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12};
  for (int k = 0; k < 5; ++k) CHECK(w2[k] * h * h == doctest::Approx(c2[k]).scale(1.0).epsilon(1e-12));
  // Uneven nodes: exact on quartics.
  const std::vector<double> ys = {0.0, 0.13, 0.3, 0.38, 0.61};
  const auto w = fornberg_weights(0.3, ys, 1);
  double d = 0.0;
  for (int k = 0; k < 5; ++k) d += w[k] * std::pow(ys[k], 4);
  CHECK(d == doctest::Approx(4.0 * std::pow(0.3, 3)).epsilon(1e-12));
}

TEST_CASE("JSON round trip is exact") {
  const InitialData d = rn_ads_data(Chart::make(3, {2.0, 2.5, 3.0}, 6), 0.5, 0.2);
  const GridSamples a = sample_grid(d);
  const GridSamples b = grid_from_json(grid_to_json(a));
  CHECK(b.n == 3);
  CHECK(b.tau == a.tau);
  CHECK(b.label == a.label);
  CHECK(b.radial_nodes == a.radial_nodes);
  CHECK(b.g == a.g);
  CHECK(b.e == a.e);
  CHECK(b.K == a.K);
  CHECK(b.E == a.E);
  CHECK(b.angular_weights == a.angular_weights);
  REQUIRE(b.angular_nodes.size() == a.angular_nodes.size());
  for (std::size_t k = 0; k < a.angular_nodes.size(); ++k) {
    CHECK(b.angular_nodes[k] == a.angular_nodes[k]);
  }
  const auto path = std::filesystem::temp_directory_path() / "adscharge_grid_roundtrip.json";
  write_grid(a, path.string());
  CHECK(read_grid(path.string()).g == a.g);
  std::filesystem::remove(path);
}

TEST_CASE("malformed grids are config errors") {
  CHECK_THROWS_AS(grid_from_json("{"), ConfigError);
  CHECK_THROWS_AS(grid_from_json(R"({"format":"other"})"), ConfigError);
  const InitialData d = hyperbolic_data(Chart::make(3, {2.0, 2.5}, 4));
  GridSamples g = sample_grid(d);
  g.K.pop_back();
  CHECK_THROWS(g.validate());
  CHECK_THROWS_AS(read_grid("/nonexistent/grid.json"), ConfigError);
}

TEST_CASE("grid fields: values at nodes, errors elsewhere") {
  const InitialData d = rn_ads_data(Chart::make(3, uniform_radii(2.0, 3.0, 0.1), 10), 0.5, 0.2);
  const GridSamples s = sample_grid(d);
  const auto layout = make_grid_layout(3, s.radial_nodes, s.angular_nodes, {}, s.angular_degree);
  CHECK(angular_fit_degree(*layout) == 5);
  const FieldPtr e = grid_field(layout, 2, Variance::Covariant, s.e);
  const Point y = s.radial_nodes[5] * s.angular_nodes[7];
  CHECK((e->value(y).as_mat() - d.e->value(y).as_mat()).norm() <= 1e-15);
  // Radial and angular derivative against the model.
  const Tensor de = e->derivative(y);
  const Tensor exact = d.e->derivative(y);
  double err = 0.0;
  for (std::size_t k = 0; k < de.size(); ++k) err = std::max(err, std::abs(de[k] - exact[k]));
  // Fourth-order radial differences at h = 0.1 dominate; the angular fit is
  // exact for this quadratic dependence on xhat.
  CHECK(err <= 2e-4 * exact.max_abs());
  GridOptions aliased;
  aliased.angular_fit_degree = 6;
  CHECK_THROWS_AS(make_grid_layout(3, s.radial_nodes, s.angular_nodes, aliased, s.angular_degree),
                  ConfigError);
  CHECK_THROWS_AS(e->value(2.05 * s.angular_nodes[0]), DomainError);
  // The first radius has no centered stencil.
  CHECK_THROWS_AS(e->derivative(s.radial_nodes[0] * s.angular_nodes[0]), StencilError);
  const auto diff = differentiable_radii(*layout, 1);
  CHECK(diff.size() == s.radial_nodes.size() - 4);
  CHECK(radial_spacing(*layout) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("one-sided stencils extend the differentiable range") {
  const auto radii = uniform_radii(2.0, 3.0, 0.1);
  const SphereRule rule = make_sphere_rule(3, 6);
  GridOptions o;
  o.one_sided = true;
  const auto layout = make_grid_layout(3, radii, rule.nodes, o, rule.degree);
  CHECK(differentiable_radii(*layout, 1).size() == radii.size());
}

TEST_CASE("charges from grid samples match the model") {
  const Chart fine = Chart::make(3, uniform_radii(4.6, 11.4, 0.1), 10);
  const GridSamples s = grid_from_json(grid_to_json(sample_grid(rn_ads_data(fine, 0.5, 0.2))));
  GridOptions go;
  go.chart_radii = 6;
  const InitialData d = grid_initial_data(s, go);
  CHECK(d.chart.radial_nodes.size() == 6);
  ChargeOptions co;
  co.quadrature_check_extra = 0;
  const ChargeReport rep = mass_vector(d, co);
  CHECK(rep.m_mu(0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(rep.Q == doctest::Approx(0.2).epsilon(1e-5));
  CHECK(rep.m_mu.tail(3).norm() <= 1e-6);
}

}  // TEST_SUITE
