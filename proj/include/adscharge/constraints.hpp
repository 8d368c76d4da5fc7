// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <string>
#include <vector>

#include "adscharge/initial_data.hpp"
#include "adscharge/kids.hpp"

namespace adscharge {

/// Constraint map at a point, computed with g.  `phi1_shifted` is
/// phi1 + n(n-1), evaluated directly from g - b so that it keeps relative
/// precision when the data are close to hyperbolic space.
struct ConstraintValues {
  double phi1 = 0.0;
  Vec phi2;
  double phi3 = 0.0;
  double phi1_shifted = 0.0;
};

ConstraintValues constraint_map(const InitialData& data, const Point& y);

/// Halved constraint values; `mu_shifted` = mu + n(n-1)/2 and `j_norm` = |J|_g.
struct Densities {
  double mu = 0.0;
  Vec J;
  double varpi = 0.0;
  double mu_shifted = 0.0;
  double j_norm = 0.0;
};

Densities densities(const InitialData& data, const Point& y);

/// mu + n(n-1)/2 - sqrt(|J|_g^2 + varpi^2).
double dec_margin(const Densities& d);

/// A sample fails when margin < -(tolerance + relative_tolerance * scale),
/// where scale = n(n-1)(|e|_b + |K|_b + |E|_b) + |mu| + |J| + |varpi| is the
/// size of the terms that cancel inside the margin.
struct DecOptions {
  double tolerance = 1e-14;
  double relative_tolerance = 1e-6;
  /// Sample points; the chart nodes when empty.
  std::vector<Point> samples;
};

struct DecReport {
  double min_margin = 0.0;
  double max_margin = 0.0;
  Point worst_point;
  double worst_scale = 0.0;      ///< scale at the worst point
  double worst_excess = 0.0;     ///< min over samples of margin + allowance
  std::size_t samples = 0;
  double tolerance = 0.0;
  double relative_tolerance = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

DecReport dec_check(const InitialData& data, const DecOptions& options = {});

/// Pairing <eta, Phi(h) - Phi(h_0)>_b at a point.
double constraint_pairing(const InitialData& data, const Kid& kid,
                          const Point& y);

struct IntegrabilityOptions {
  /// Shell integrals below this fraction of the reference scale
  /// max_r oint V |e|_b dsigma are treated as zero.
  double negligible_ratio = 1e-6;
  std::size_t min_radii = 4;
};

/// Shell integrals of |<eta, Phi(h) - Phi(h_0)>_b| between consecutive radial
/// nodes (midpoint rule) and an exponential fit of the shell densities.
struct IntegrabilityReport {
  std::vector<double> shell_midpoints;
  std::vector<double> shell_integrals;
  double log_slope = 0.0;
  double scale = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

IntegrabilityReport integrability_check(const InitialData& data,
                                        const Kid& kid,
                                        const IntegrabilityOptions& options = {});

}  // namespace adscharge
