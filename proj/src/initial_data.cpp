// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/initial_data.hpp"

#include <algorithm>
#include <cmath>

#include "adscharge/errors.hpp"

namespace adscharge {

Mat InitialData::g(const Point& y) const {
  return background_metric(y) + e->value(y).as_mat();
}

FieldPtr InitialData::metric_field() const {
  return linear_combination({{1.0, background_metric_field(n)}, {1.0, e}});
}

void InitialData::validate() const {
  chart.validate();
  if (chart.n != n) {
    throw ShapeError("initial data: chart dimension mismatch");
  }
  if (!e || !K || !E) {
    throw ShapeError("initial data: e, K and E are required");
  }
  auto check = [this](const FieldPtr& f, int rank, Variance v, const char* name) {
    if (f->dim() != n || f->rank() != rank || f->variance() != v) {
      throw ShapeError(std::string("initial data: field ") + name +
                       " has the wrong valence");
    }
  };
  check(e, 2, Variance::Covariant, "e");
  check(K, 2, Variance::Covariant, "K");
  check(E, 1, Variance::Contravariant, "E");
}

InitialData make_initial_data(Chart chart, FieldPtr e, FieldPtr K, FieldPtr E,
                              double tau, std::string label) {
  InitialData d;
  d.n = chart.n;
  d.chart = std::move(chart);
  d.e = std::move(e);
  d.K = std::move(K);
  d.E = std::move(E);
  d.tau = tau;
  d.label = std::move(label);
  d.validate();
  return d;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

DecayReport decay_verification(const InitialData& data, double tau,
                               const DecayOptions& options) {
  DecayReport rep;
  rep.tau = tau;
  rep.radii = data.chart.radial_nodes;
  const int n = data.n;
  for (double r : rep.radii) {
    const double w = std::exp(tau * r);
    double se = 0.0;
    double sde = 0.0;
    double sk = 0.0;
    double sel = 0.0;
    for (const Vec& xhat : data.chart.sphere.nodes) {
      const Point y = r * xhat;
      se = std::max(se, norm_b(data.e->value(y), Variance::Covariant, y));
      sde = std::max(sde, norm_b(covariant_derivative_b(*data.e, y),
                                 Variance::Covariant, y));
      sk = std::max(sk, norm_b(data.K->value(y), Variance::Covariant, y));
      sel = std::max(sel, norm_b(data.E->value(y), Variance::Contravariant, y));
    }
    rep.metric.push_back(w * se);
    rep.metric_derivative.push_back(w * sde);
    rep.extrinsic.push_back(w * sk);
    rep.electric.push_back(w * sel);
  }

  if (!(tau > 0.5 * n)) {
    rep.verdict = Verdict::Fail;
    rep.reason = "declared rate does not exceed n/2";
    return rep;
  }
  if (rep.radii.size() < options.min_radii) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "radial grid too coarse";
    return rep;
  }
  const std::size_t start = rep.radii.size() / 2;
  for (const auto* series :
       {&rep.metric, &rep.metric_derivative, &rep.extrinsic, &rep.electric}) {
    for (std::size_t k = start; k < series->size(); ++k) {
      const double v = (*series)[k];
      if (!std::isfinite(v) || v > options.bound) {
        rep.verdict = Verdict::Fail;
        rep.reason = "weighted norm exceeds the bound";
        return rep;
      }
      if (k > start && v > (*series)[k - 1] * (1.0 + options.growth_tolerance) +
                               1e-12 * options.bound) {
        rep.verdict = Verdict::Fail;
        rep.reason = "weighted norm grows on the outer nodes";
        return rep;
      }
    }
  }
  rep.verdict = Verdict::Pass;
  rep.reason = "weighted norms bounded and non-increasing on the outer nodes";
  return rep;
}

}  // namespace adscharge
