// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adscharge/field.hpp"
#include "adscharge/tensor.hpp"

namespace adscharge {

/// Area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);

/// sinh(r)/r and its first two derivatives, with series near r = 0.
double sinh_ratio(double r);
double sinh_ratio_d1(double r);
double sinh_ratio_d2(double r);

/// Sum with pairwise (cascade) reduction in a fixed order.
double pairwise_sum(std::span<const double> values);

/// Product rule on S^{n-1}: Gauss-Gegenbauer in the cosines of the polar
/// angles (weight matching the round measure, so every factor is a true Gauss
/// rule) and the trapezoid rule in the azimuth.  Exact for polynomials in the
/// embedding coordinates up to `degree`.
struct SphereRule {
  int n = 0;
  int degree = 0;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

SphereRule make_sphere_rule(int n, int degree);
int default_sphere_degree(int n);

/// Gauss rule for the weight (1-t^2)^(lambda-1/2) on [-1, 1].
void gauss_gegenbauer(int points, double lambda, std::vector<double>& nodes,
                      std::vector<double>& weights);

/// `count` radii from r_min to r_max with constant ratio.
std::vector<double> geometric_ladder(double r_min, double r_max, int count);

/// The asymptotic chart (R, oo) x S^{n-1}.  Points are stored in geodesic
/// normal Cartesian coordinates y = r * xhat, in which the background metric is
/// b = dr^2 + sinh^2(r) h_round.
struct Chart {
  int n = 0;
  std::vector<double> radial_nodes;
  SphereRule sphere;

  static Chart make(int n, std::vector<double> radial_nodes, int degree);
  void validate() const;
};

/// Checks r = |y| > 0 and returns it.
double chart_radius(const Point& y);

/// Background metric in polar form: b_rr and the factor of the round metric.
struct PolarMetric {
  double b_rr = 1.0;
  double sphere_factor = 0.0;
};
PolarMetric background_metric_polar(double r);

Mat background_metric(const Point& y);
Mat background_inverse(const Point& y);
/// d_k b_ij stored as (i, j, k).
Tensor background_metric_derivative(const Point& y);
/// Gamma^k_ij stored as (k, i, j).
Tensor background_christoffel(const Point& y);
/// d_m Gamma^k_ij stored as (k, i, j, m), by finite differences.
Tensor background_christoffel_derivative(const Point& y,
                                         double h = default_fd_step);
FieldPtr background_metric_field(int n);

/// F with b = F F: columns map the b-orthonormal frame (radial unit vector and
/// rescaled tangential directions) to coordinates.  A covariant 2-tensor T has
/// frame components F^{-1} T F^{-1}, a vector V has F V.
Mat frame_map(const Point& y);
Mat inverse_frame_map(const Point& y);

/// Components in the b-orthonormal frame.
Tensor to_orthonormal(const Tensor& t, Variance variance, const Point& y);
/// Pointwise norm |T|_b.
double norm_b(const Tensor& t, Variance variance, const Point& y);

/// nabla^b of a tensor from its value and coordinate partials; the new index
/// is appended last.
Tensor covariant_derivative_b(const Tensor& value, const Tensor& partial,
                              Variance variance, const Point& y);
Tensor covariant_derivative_b(const Field& field, const Point& y);

/// Scalar curvature of a metric field from its Christoffel symbols, whose
/// derivatives are taken by finite differences.
double scalar_curvature(const Field& metric, const Point& y);

/// Integral over S_r of f(xhat) against the b-induced measure.
double sphere_integrate(const SphereRule& rule, double r,
                        const std::function<double(const Vec&)>& f);

}  // namespace adscharge
