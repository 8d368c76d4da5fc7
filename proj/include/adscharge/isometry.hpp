// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <functional>

#include "adscharge/initial_data.hpp"
#include "adscharge/tensor.hpp"

namespace adscharge {

/// An isometry of hyperbolic space acting on geodesic normal coordinates,
/// together with its action on the static potentials:
/// V_mu(map(y)) = sum_nu lorentz(mu, nu) V_nu(y).
struct Isometry {
  std::function<Point(const Point&)> map;
  std::function<Mat(const Point&)> jacobian;
  Mat lorentz;
};

Isometry rotation_isometry(const Mat& rotation);
/// Boost of rapidity `rapidity` mixing V_0 and V_axis (axis in 1..n).
Isometry boost_isometry(int n, int axis, double rapidity);

/// Data pulled back by the isometry, on the same chart.  Charges of the pulled
/// back data satisfy m' = lorentz^{-1} m.
InitialData pullback_data(const InitialData& data, const Isometry& iso);

}  // namespace adscharge
