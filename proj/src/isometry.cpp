// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/isometry.hpp"

#include <cmath>

#include "adscharge/errors.hpp"
#include "adscharge/kids.hpp"

namespace adscharge {

namespace {

// asinh(rho)/rho and its derivative, smooth at rho = 0.
double asinh_ratio(double rho) {
  if (rho < 1e-4) {
    return 1.0 - rho * rho / 6.0;
  }
  return std::asinh(rho) / rho;
}

double asinh_ratio_d(double rho) {
  if (rho < 1e-4) {
    return -rho / 3.0;
  }
  return (rho / std::sqrt(1.0 + rho * rho) - std::asinh(rho)) / (rho * rho);
}

}  // namespace

Isometry rotation_isometry(const Mat& rotation) {
  const int n = static_cast<int>(rotation.rows());
  if (rotation.cols() != n ||
      (rotation.transpose() * rotation - Mat::Identity(n, n)).norm() > 1e-12) {
    throw ShapeError("rotation_isometry: matrix must be orthogonal");
  }
  Isometry iso;
  iso.map = [rotation](const Point& y) { return Point(rotation * y); };
  iso.jacobian = [rotation](const Point&) { return rotation; };
  iso.lorentz = Mat::Identity(n + 1, n + 1);
  iso.lorentz.bottomRightCorner(n, n) = rotation;
  return iso;
}

Isometry boost_isometry(int n, int axis, double rapidity) {
  if (axis < 1 || axis > n) {
    throw ShapeError("boost_isometry: axis must be in 1..n");
  }
  Mat lam = Mat::Identity(n + 1, n + 1);
  lam(0, 0) = lam(axis, axis) = std::cosh(rapidity);
  lam(0, axis) = lam(axis, 0) = std::sinh(rapidity);
  // y -> X = (V_0, ..., V_n) -> lam X -> y' = asinh(|Z|)/|Z| Z, Z spatial part.
  auto spatial = [lam, n](const Point& y) {
    Vec x(n + 1);
    for (int mu = 0; mu <= n; ++mu) {
      x(mu) = static_potential(mu, y, PotentialModel::Polar);
    }
    return Vec((lam * x).tail(n));
  };
  Isometry iso;
  iso.map = [spatial](const Point& y) {
    const Vec z = spatial(y);
    return Point(asinh_ratio(z.norm()) * z);
  };
  iso.jacobian = [spatial, lam, n](const Point& y) {
    Mat dx(n + 1, n);
    for (int mu = 0; mu <= n; ++mu) {
      dx.row(mu) = static_potential_gradient(mu, y).transpose();
    }
    const Mat dz = (lam * dx).bottomRows(n);
    const Vec z = spatial(y);
    const double rho = z.norm();
    Mat dmap = asinh_ratio(rho) * Mat::Identity(n, n);
    if (rho > 0.0) {
      dmap += asinh_ratio_d(rho) / rho * z * z.transpose();
    }
    return Mat(dmap * dz);
  };
  iso.lorentz = lam;
  return iso;
}

InitialData pullback_data(const InitialData& data, const Isometry& iso) {
  InitialData out = data;
  out.e = pullback_field(data.e, iso.map, iso.jacobian);
  out.K = pullback_field(data.K, iso.map, iso.jacobian);
  out.E = pullback_field(data.E, iso.map, iso.jacobian);
  out.label = data.label + " (pulled back)";
  return out;
}

}  // namespace adscharge
