// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adscharge/clifford.hpp"
#include "adscharge/initial_data.hpp"

namespace adscharge {

/// Restricted data at one boundary node.  Vectors are stored both in chart
/// components and in a g-orthonormal frame (the Cholesky frame of g), where
/// Clifford multiplication acts.
struct BoundaryNode {
  Point y;
  double weight = 0.0;  ///< induced area element times the angular weight
  Vec nu;               ///< outward g-unit normal, chart components
  Vec nu_frame;         ///< the same in the orthonormal frame
  double H = 0.0;
  double tr_K = 0.0;          ///< trace of K along the boundary
  Vec k_tangential_frame;     ///< K(nu)^T in the orthonormal frame
  double k_tangential_norm = 0.0;
  double k_nn = 0.0;          ///< K(nu, nu)
  double E_nu = 0.0;          ///< g(E, nu)
  double dr_norm = 1.0;       ///< |dr|_g, relates dA/drho to H
};

struct BoundaryData {
  int n = 0;
  std::string component = "inner";
  double rho = 0.0;  ///< level-set radius, 0 for supplied surfaces
  std::vector<BoundaryNode> nodes;
  double vol = 0.0;
  std::optional<double> yamabe;
  bool round_class = false;
  bool time_symmetric = false;
  void validate() const;
};

struct BoundaryOptions {
  int degree = -1;  ///< angular degree; the chart's rule when negative
  std::optional<double> yamabe;
  /// The induced conformal class is round (true for every level set of a
  /// rotationally symmetric metric); enables the built-in Yamabe value.
  bool round_class = false;
  std::string component = "inner";
};

/// Y(S^{n-1}, round) = (n-1)(n-2) omega_{n-1}^{2/(n-1)}.
double round_yamabe(int n);

/// The coordinate sphere {r = rho} with outward normal toward infinity.
BoundaryData level_set_boundary(const InitialData& data, double rho,
                                const BoundaryOptions& options = {});

/// Node quantities from supplied point values: H, tr K, K(nu)^T (orthonormal
/// frame, orthogonal to nu_frame), E_nu.  Used for user supplied surfaces.
BoundaryNode boundary_node(const Vec& nu_frame, double H, double tr_K,
                           const Vec& k_tangential_frame, double E_nu,
                           double weight = 0.0);

/// Mean curvature of {r = rho} two ways: the total first variation of area
/// d/drho Vol(S_rho) by finite differences, and the prediction
/// oint H |dr|_g^{-1} dA from the pointwise H.
struct AreaVariationCheck {
  double finite_difference = 0.0;
  double predicted = 0.0;
  double relative_gap = 0.0;
};
AreaVariationCheck area_variation_check(const InitialData& data, double rho,
                                        const BoundaryOptions& options = {},
                                        double h = 1e-3);

struct Expansions {
  std::vector<double> theta_plus;
  std::vector<double> theta_minus;
  bool future_trapped = false;
  bool past_trapped = false;
};
Expansions null_expansions(const BoundaryData& bd);

double h_max(int n, double H, double tr_K, double k_tangential_norm,
             double E_nu);
std::vector<double> h_max(const BoundaryData& bd);

enum class AdmissibilityMode { TrappedA, YamabeB, TsA, TsB };
std::string to_string(AdmissibilityMode mode);
/// Parses "trapped_a", "yamabe_b", "ts_a", "ts_b"; ConfigError otherwise.
AdmissibilityMode parse_admissibility_mode(const std::string& name);

struct AdmissibilityReport {
  std::string component;
  AdmissibilityMode mode = AdmissibilityMode::YamabeB;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;  ///< worst RHS - LHS over the nodes
  std::size_t worst_node = 0;
  double lhs = 0.0;     ///< LHS at the worst node
  double rhs = 0.0;
  /// n = 3 only: sqrt(4 pi / Vol + 1) and its gap to the general RHS.
  std::optional<double> reduced_rhs;
  std::optional<double> reduction_gap;
  /// yamabe_b: |(2/(n-1)) sqrt(dirac_bound_rhs) - RHS|.
  std::optional<double> dirac_gap;
};

/// Verdict with margin for one boundary component.  Yamabe-type modes throw
/// HypothesisError unless a positive Yamabe invariant is available; the ts
/// modes require time-symmetric data.
AdmissibilityReport admissibility(const BoundaryData& bd, AdmissibilityMode mode,
                                  double tolerance = 1e-10);

/// (n-1)/(4(n-2)) Y / Vol^{2/(n-1)} + (n-1)^2/4.
double dirac_bound_rhs(const BoundaryData& bd);
double dirac_bound_rhs(int n, double yamabe, double vol);

/// Point values entering the boundary endomorphism, in an orthonormal frame.
struct BoundaryPointValues {
  Vec nu;
  double H = 0.0;
  double tr_K = 0.0;
  Vec k_tangential;
  double E_nu = 0.0;
};
BoundaryPointValues point_values(const BoundaryNode& node);

/// H + tr K c(nu) gamma - c(K(nu)^T) gamma - (n-1) E_nu gamma.
CMat h_endomorphism_matrix(const CliffordRep& rep, const BoundaryPointValues& v);
/// Re <H phi, phi>.
double h_endomorphism_form(const CliffordRep& rep, const BoundaryPointValues& v,
                           const Spinor& phi);

}  // namespace adscharge
