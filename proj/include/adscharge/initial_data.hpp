// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adscharge/field.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

/// Charged initial data (g, K, E) on the asymptotic chart.  The metric is held
/// as its deviation e = g - b so that small deviations keep full relative
/// precision far out.
struct InitialData {
  int n = 0;
  Chart chart;
  FieldPtr e;  ///< g - b, covariant symmetric
  FieldPtr K;  ///< covariant symmetric
  FieldPtr E;  ///< vector
  double tau = 0.0;
  bool time_symmetric = false;
  std::string label;
  std::vector<std::pair<std::string, double>> parameters;

  Mat g(const Point& y) const;
  FieldPtr metric_field() const;
  void validate() const;
};

InitialData make_initial_data(Chart chart, FieldPtr e, FieldPtr K, FieldPtr E,
                              double tau, std::string label = "custom");

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct DecayOptions {
  double bound = 1.0e3;            ///< the constant C in O(e^{-tau r})
  double growth_tolerance = 0.05;  ///< allowed relative growth between nodes
  std::size_t min_radii = 4;
};

/// Weighted sup-norms max over S_r of e^{tau r}|.|_b per radial node.
struct DecayReport {
  double tau = 0.0;
  std::vector<double> radii;
  std::vector<double> metric;
  std::vector<double> metric_derivative;
  std::vector<double> extrinsic;
  std::vector<double> electric;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

DecayReport decay_verification(const InitialData& data, double tau,
                               const DecayOptions& options = {});

}  // namespace adscharge
