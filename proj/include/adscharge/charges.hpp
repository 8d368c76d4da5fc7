// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adscharge/clifford.hpp"
#include "adscharge/initial_data.hpp"
#include "adscharge/kids.hpp"

namespace adscharge {

/// Sign flips of single integrand pieces, used only to check that the
/// verification suites notice a broken integrand.
enum class IntegrandMutation { None, FlipU1, FlipU2, FlipU3 };

/// The pieces U1(V), U2(alpha), U3(f) at a point as covectors.  All traces,
/// divergences and index moves use b.
struct IntegrandValue {
  Vec u1;
  Vec u2;
  Vec u3;
  Vec total() const { return u1 + u2 + u3; }
};

IntegrandValue integrand_U(const Kid& kid, const InitialData& data,
                           const Point& y,
                           IntegrandMutation mutation = IntegrandMutation::None);

/// Least-squares fit I(r) = I_oo + c exp(-sigma (r - r_last)) at fixed sigma.
struct FitResult {
  std::string model = "I_inf + c*exp(-sigma*r)";
  double limit = 0.0;
  double amplitude = 0.0;
  double sigma = 0.0;
  double residual = 0.0;     ///< rms of the fit residuals
  double shift = 0.0;        ///< change of the limit when the innermost radius is dropped
  double uncertainty = 0.0;  ///< max(residual, shift) plus a rounding floor
};

FitResult fit_exponential_tail(const std::vector<double>& radii,
                               const std::vector<double>& values, double sigma);

/// The sigma in [lo, hi] minimizing the scale-weighted residuals of all
/// series jointly.  Sharing one sigma keeps the extrapolation linear.  Series
/// smaller than min_relative_scale times the largest one are rounding noise
/// and left out; weighted by their own scale they would dominate the cost.
double calibrate_sigma(const std::vector<double>& radii,
                       const std::vector<std::vector<double>>& series,
                       double lo, double hi, double min_relative_scale = 1e-6);

struct ChargeOptions {
  double sigma_margin = 0.5;
  double sigma_max = 8.0;
  /// Relative uncertainty (against the largest raw integral) above which a
  /// value is flagged unreliable.
  double divergence_threshold = 1e-6;
  bool waive_decay = false;
  DecayOptions decay;
  IntegrandMutation mutation = IntegrandMutation::None;
  std::size_t min_radii = 4;
  /// The outermost sphere is integrated again with a rule of this many more
  /// degrees; the difference is the quadrature part of the uncertainty.  0
  /// disables the check (needed for grid data, whose nodes are fixed).
  int quadrature_check_extra = 4;
};

struct XiResult {
  double value = 0.0;
  std::vector<double> radii;
  std::vector<double> raw;         ///< oint U(nu) dsigma per radius
  std::vector<double> normalized;  ///< raw times the normalization
  FitResult fit;                   ///< fit of the raw integrals
  double quadrature_error = 0.0;   ///< normalized, from the refined rule
  double uncertainty = 0.0;        ///< normalized fit plus quadrature error
  bool reliable = true;
  std::string warning;
};

/// Evaluates the charge functional on one data set.  The KID-independent part
/// of the integrand is cached at every quadrature node on construction, and a
/// single decay exponent sigma is calibrated on the basis KIDs.
class ChargeEvaluator {
 public:
  explicit ChargeEvaluator(InitialData data, ChargeOptions options = {});

  const InitialData& data() const { return data_; }
  const ChargeOptions& options() const { return options_; }
  const DecayReport& decay() const { return decay_; }
  double sigma() const { return sigma_; }
  /// Largest raw integral over the basis KIDs; the reference for relative
  /// fit uncertainties of components that vanish.
  double global_scale() const { return global_scale_; }
  int n() const { return data_.n; }
  /// 1 / (2 (n-1) omega_{n-1}).
  double normalization() const;
  /// 1 / omega_{n-1}, the prefactor of the direct flux formula for Q.
  double flux_normalization() const;

  std::vector<double> raw_integrals(const Kid& kid) const;
  XiResult xi(const Kid& kid) const;
  /// Q from the flux of E, extrapolated with the same sigma.
  XiResult electric_charge_direct() const;
  /// Per-radius matrices W_r with u^* W_r u = oint U(K(u))(nu) dsigma for the
  /// spinor KIDs, assembled directly from the sesquilinear pieces.
  std::vector<CMat> spinor_form_raw(const CliffordRep& rep) const;

  /// The form on the outermost sphere with the refined rule, if enabled.
  std::optional<CMat> spinor_form_check(const CliffordRep& rep) const;

  /// Extrapolation of a raw series with this evaluator's sigma.
  /// `quadrature_raw` is the raw quadrature error estimate.
  XiResult extrapolate(const std::vector<double>& raw, double normalization,
                       double quadrature_raw = 0.0) const;
  /// |refined - standard| raw integral on the outermost sphere.
  double quadrature_error(const Kid& kid, const std::vector<double>& raw) const;

 private:
  struct Node {
    Point y;
    double weight = 0.0;  ///< quadrature weight times sinh^{n-1}(r)
    double s1 = 0.0;      ///< (div_b e - d tr_b e)(nu)
    Vec p;                ///< coefficient of dV
    Vec q;                ///< coefficient of alpha
    double e3 = 0.0;      ///< 2(n-1) E^flat(nu)
    double flux = 0.0;    ///< E^flat(nu)
  };

  std::vector<Node> make_ring(double r, const SphereRule& rule) const;
  double ring_integral(const std::vector<Node>& ring, const Kid& kid) const;
  CMat spinor_ring_form(const CliffordRep& rep, const std::vector<Node>& ring) const;

  InitialData data_;
  ChargeOptions options_;
  std::vector<Node> check_ring_;
  DecayReport decay_;
  std::vector<std::vector<Node>> nodes_;
  double sigma_ = 1.0;
  double global_scale_ = 0.0;
  bool decay_ok_ = true;
};

struct NamedCharge {
  std::string label;
  XiResult result;
};

struct ChargeReport {
  int n = 0;
  Vec m_mu;
  std::vector<double> killing_charges;
  std::vector<std::string> killing_labels;
  double Q = 0.0;
  double Q_direct = 0.0;
  double m = 0.0;
  CausalClass causal_class = CausalClass::Null;
  bool causal_future = true;
  double sigma = 0.0;
  std::vector<double> radii;
  std::vector<NamedCharge> details;
  bool reliable = true;
  std::vector<std::string> warnings;
  DecayReport decay;
  /// Largest fit uncertainty among the mass components and Q.
  double max_uncertainty = 0.0;
};

ChargeReport mass_vector(const ChargeEvaluator& evaluator);
ChargeReport mass_vector(const InitialData& data,
                         const ChargeOptions& options = {});

XiResult electric_charge(const ChargeEvaluator& evaluator);

/// M = m_0 Id - i sum_j m_j Gamma_j + Q chirality.
struct PositivityMatrix {
  CMat M;
  double min_eig = 0.0;
  Spinor min_vector;
};

PositivityMatrix positivity_matrix(const Vec& m_mu, double Q,
                                   const CliffordRep& rep);
/// m_0 - sqrt(|m_spatial|^2 + Q^2).
double positivity_closed_form(const Vec& m_mu, double Q);

struct ConeScan {
  int samples = 0;
  double sampled_min = 0.0;
  Spinor worst_u;
  double worst_direct = 0.0;    ///< Xi(K(worst_u)) through the KID path
  double certified_min = 0.0;   ///< smallest eigenvalue of the form
  Spinor certificate_u;
  double certificate_direct = 0.0;
  double fit_budget = 0.0;      ///< extrapolation uncertainty of the form
  double quadrature_budget = 0.0;  ///< refined-rule change of the form
  double budget = 0.0;          ///< sum of the two plus a rounding floor
  CMat form;
  bool time_symmetric = false;
  double matrix_gap = 0.0;      ///< max |W - 2M| when time symmetric
  double worst_gap = 0.0;       ///< |Xi(K(worst_u)) - 2 <u, M u>| when time symmetric
};

/// Xi(K(u)) over seeded random unit u plus the standard basis, refined by the
/// minimizing eigenvector of the Hermitian form u -> Xi(K(u)).
ConeScan cone_positivity_scan(const ChargeEvaluator& evaluator,
                              const CliffordRep& rep, int samples,
                              std::uint64_t seed,
                              const ChargeReport* report = nullptr);

}  // namespace adscharge
