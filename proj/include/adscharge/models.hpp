// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "adscharge/initial_data.hpp"

namespace adscharge {

/// Normalization constant c_n = sqrt((n-1)(n-2)/2) relating the Maxwell
/// 2-form to E.  It cancels out of the induced data; kept for documentation.
double maxwell_constant(int n);

/// Default chart for model data: six geometrically spaced radii in [5, 11].
Chart default_model_chart(int n, int degree = -1);

struct ModelSpec {
  std::string family = "hyperbolic";  ///< hyperbolic | schwarzschild_ads | rn_ads | perturbation
  int n = 3;
  double mbar = 0.0;
  double qbar = 0.0;
  double tau = 0.0;      ///< perturbation decay rate (default n)
  double epsilon = 0.0;  ///< perturbation amplitude
  std::uint64_t seed = 0;
  std::string profile = "generic";  ///< generic | conformal
  double beta = 0.2;                ///< rapidity of the conformal profile
  double rate = 0.0;                ///< actual envelope rate when > 0
  bool enforce_rate = true;         ///< reject tau <= n/2
};

/// Static-coordinate description of the Reissner-Nordstrom-AdS slice
/// g = U(s)^{-1} ds^2 + s^2 h_round with
/// U = 1 + s^2 - 2 mbar / s^{n-2} + qbar^2 / s^{2(n-2)}, rewritten in the
/// radius r with g_rr = 1 and s/sinh(r) -> 1:
/// r = asinh(s) - delta(s), delta(s) = int_s^oo (U^{-1/2} - (1+t^2)^{-1/2}) dt.
class RnAdsProfile {
 public:
  RnAdsProfile(int n, double mbar, double qbar);

  struct Sample {
    double r = 0.0;
    double s = 0.0;
    double delta = 0.0;
    double sqrt_u = 0.0;
    double area_deficit = 0.0;       ///< A = s^2 - sinh^2 r
    double area_deficit_d = 0.0;     ///< dA/dr
    double area_deficit_dd = 0.0;    ///< d^2A/dr^2
    double field = 0.0;              ///< qbar / s^{n-1}
    double field_d = 0.0;            ///< d/dr of the above
  };

  int n() const { return n_; }
  double mbar() const { return m_; }
  double qbar() const { return q_; }
  double U(double s) const;
  double delta(double s) const;
  Sample at(double r) const;

  /// Largest zero of U (0 when U has none).
  double horizon() const { return s_h_; }
  /// Radius of the inner end of the exterior domain.
  double r_inner() const { return r_inner_; }
  /// "vacuum", "black_hole" or "naked_singularity".
  const std::string& regime() const { return regime_; }
  bool complete() const { return regime_ != "naked_singularity"; }

 private:
  Sample compute(double r) const;
  double integrand(double sigma) const;

  int n_;
  double m_;
  double q_;
  double s_h_ = 0.0;
  double r_inner_ = 0.0;
  std::string regime_;
  mutable std::mutex mutex_;
  mutable std::map<double, Sample> cache_;
};

InitialData hyperbolic_data(const Chart& chart);
InitialData hyperbolic_data(int n);
InitialData rn_ads_data(const Chart& chart, double mbar, double qbar);
InitialData rn_ads_data(int n, double mbar, double qbar);
InitialData schwarzschild_ads_data(const Chart& chart, double mbar);

struct PerturbationOptions {
  std::string profile = "generic";
  double beta = 0.2;  ///< rapidity of the conformal profile
  double rate = 0.0;  ///< actual envelope rate; tau when 0
  bool enforce_rate = true;
};

/// g = b + eps e^{-tau r} h(xhat), K = eps e^{-tau r} k(xhat),
/// E = eps e^{-tau r} X(xhat) with profiles affine in xhat drawn from the seed
/// (frame components in the b-orthonormal frame).
///
/// The "conformal" profile is g = (1 + eps W^{-n})^{4/(n-2)} b with K = 0,
/// E = 0, where W = cosh(beta) cosh(r) + sinh(beta) sinh(r) a.xhat is the
/// static potential of a unit future timelike vector boosted by rapidity beta
/// along a seeded direction a.  It is smooth on all of hyperbolic space, and
/// for eps >= 0 the scalar curvature satisfies R + n(n-1) >= 0 everywhere
/// because Delta W^{-n} - n W^{-n} = -n(n+1) W^{-n-2} < 0.  It decays like
/// e^{-n r}, so tau is fixed to n.
InitialData perturbed_data(const Chart& chart, double tau, double epsilon,
                           std::uint64_t seed,
                           const PerturbationOptions& options = {});

/// g = b, E = 0, K = eps e^{-(n-1) r} xhat_axis (b - dr^2): extrinsic
/// curvature only, tangential and pure trace on each sphere.  Only the boost
/// charge along `axis` (1..n) is nonzero, which makes it a regression for the
/// momentum part of the charge integrand.  No constraint equations are
/// imposed.
InitialData tangential_trace_data(const Chart& chart, double epsilon, int axis);

InitialData make_model(const ModelSpec& spec, const Chart& chart);

}  // namespace adscharge
