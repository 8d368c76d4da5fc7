// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adscharge/clifford.hpp"
#include "adscharge/field.hpp"

namespace adscharge {

enum class KidProvenance { Basis, Spinor, Custom };
std::string to_string(KidProvenance p);

/// Killing initial data (V, alpha, f) at infinity.  Empty V or alpha means
/// zero.  Spinor-generated KIDs also keep the pointwise f_u so its constancy
/// can be checked.
struct Kid {
  FieldPtr V;
  FieldPtr alpha;
  double f = 0.0;
  FieldPtr f_field;
  KidProvenance provenance = KidProvenance::Custom;
  std::string label;
  Spinor u;
};

/// a * k1 + b * k2 (provenance becomes custom).
Kid combine(double a, const Kid& k1, double b, const Kid& k2);

enum class PotentialModel { Polar, Ball };

/// V_(mu): polar points are geodesic normal coordinates y (V_0 = cosh r,
/// V_j = y_j sinh(r)/r); ball points x have V_0 = (1+|x|^2)/(1-|x|^2),
/// V_j = 2 x_j/(1-|x|^2).
double static_potential(int mu, const Point& point, PotentialModel model);
/// Gradient and Hessian of V_(mu) in geodesic normal coordinates.
Vec static_potential_gradient(int mu, const Point& y);
Mat static_potential_hessian(int mu, const Point& y);

/// Ball point of a geodesic normal point: x = tanh(r/2) y/r.
Point ball_point(const Point& y);
/// d x / d y.
Mat ball_jacobian(const Point& y);
/// omega = (1 - |x|^2)/2 evaluated from r.
double ball_conformal_factor(double r);

FieldPtr static_potential_field(int n, int mu);
/// The KID (V_(mu), 0, 0).
Kid potential_kid(int n, int mu);
/// The KID (0, 0, 1).
Kid constant_kid(int n);

/// Killing 1-forms V_mu dV_nu - V_nu dV_mu, 0 <= mu < nu <= n: rotations for
/// mu >= 1 and boosts for mu = 0.  There are n(n+1)/2 of them.
std::vector<Kid> killing_field_basis(int n);

/// zeta(x) = omega^{-1/2} (1 - sign i c(x)) u in the ball.  With the doubled
/// module for odd n this is (phi_v^+, phi_w^-).
Spinor killing_spinor(const CliffordRep& rep, const Spinor& u, const Point& x,
                      int sign = +1);

/// The quadratic map u -> (V_u, alpha_u, f_u) expressed in geodesic normal
/// coordinates.  V_u and alpha_u carry analytic first derivatives.
Kid kid_from_spinor(const CliffordRep& rep, const Spinor& u, int sign = +1);

struct KidResidual {
  double hessian = 0.0;
  double killing = 0.0;
  double df = 0.0;
  double max() const;
};

/// Sample points for residual checks: `count` seeded points with r in
/// [r_min, r_max] in geodesic normal coordinates.
std::vector<Point> kid_sample_points(int n, int count, std::uint64_t seed,
                                     double r_min = 0.3, double r_max = 3.0);

/// Sup over samples of the b-norms of the three components of the adjoint
/// linearized constraint operator applied to the KID.
KidResidual adjoint_kernel_residual(const Kid& kid,
                                    const std::vector<Point>& samples);

/// max_i |nabla_{e_i} zeta + (sign i/2) Gamma_i zeta| at a ball point, with
/// nabla the spin connection of omega^{-2} delta and the partials taken with
/// fourth-order central differences of step h.
double killing_spinor_residual(const CliffordRep& rep, const Spinor& u,
                               const Point& x, int sign = +1, double h = 1e-3);
/// The same residual for an arbitrary spinor field in the ball.
double spinor_field_residual(const CliffordRep& rep,
                             const std::function<Spinor(const Point&)>& zeta,
                             const Point& x, int sign = +1, double h = 1e-3);

enum class CausalClass { TimelikeFuture, TimelikePast, Null, Spacelike };
std::string to_string(CausalClass c);

/// eta(X, Y) = X0 Y0 - sum_j Xj Yj on coefficient vectors of V_(mu).
double eta_inner(const Vec& x, const Vec& y);
CausalClass causal_class(const Vec& x, double tol = 1e-12);
/// X0 >= |X_spatial| up to tol (includes null and zero vectors).
bool is_causal_future(const Vec& x, double tol = 1e-12);

}  // namespace adscharge
