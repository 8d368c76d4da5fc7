// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "adscharge/tensor.hpp"

namespace adscharge {

using Complex = std::complex<double>;
using Spinor = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Complex Clifford module for the Euclidean algebra Cl(n) with a chirality
/// operator: Gamma_i Gamma_j + Gamma_j Gamma_i = -2 delta_ij, Gamma_i skew
/// Hermitian, chirality a Hermitian involution anticommuting with every
/// Gamma_i.
///
/// Even n = 2m: iterated tensor products starting from the trivial module,
/// with Gamma'_i = Gamma_i (x) 1, Gamma'_{2m+1} = gamma (x) i sigma_1,
/// Gamma'_{2m+2} = gamma (x) i sigma_2, gamma' = gamma (x) sigma_3.
/// Odd n = 2m+1: a base module c of dimension 2^m (the even construction plus
/// c_n = i gamma_{2m}) doubled to Gamma_i = diag(c_i, -c_i) with chirality
/// the block swap.
struct CliffordRep {
  int n = 0;
  int dim_spinor = 0;
  bool doubled = false;
  std::vector<CMat> gammas;
  CMat chirality;
  std::string construction;

  /// The same module conjugated by a unitary U (Gamma -> U Gamma U^*).
  CliffordRep conjugated(const CMat& unitary) const;
  /// c(X) = sum_i X^i Gamma_i for X in an orthonormal frame.
  CMat clifford_matrix(const Vec& x) const;
};

/// Tag describing the construction above; embedded in reports.
std::string clifford_construction_tag();

CliffordRep build_rep(int n);

Spinor clifford_mul(const CliffordRep& rep, const Vec& x, const Spinor& phi);

/// (pi_+ phi, pi_- phi) with pi_pm = (1 pm c(nu) gamma) / 2.
std::pair<Spinor, Spinor> boundary_projections(const CliffordRep& rep,
                                               const Vec& nu,
                                               const Spinor& phi);

/// Matrix of the curvature endomorphism
/// ((mu + n(n-1)/2) + varpi gamma + c(J) gamma) / 2.
CMat curvature_endomorphism_matrix(const CliffordRep& rep, double mu,
                                   double varpi, const Vec& j);
Spinor curvature_endomorphism(const CliffordRep& rep, double mu, double varpi,
                              const Vec& j, const Spinor& phi);
/// Lower bound (mu + n(n-1)/2 - sqrt(|J|^2 + varpi^2)) / 2 of its spectrum.
double curvature_endomorphism_lower_bound(int n, double mu, double varpi,
                                          const Vec& j);

/// Largest deviation from the defining identities (anticommutation, skew
/// Hermiticity, chirality) over all generators.
struct CliffordDefects {
  double anticommutation = 0.0;
  double skew_hermitian = 0.0;
  double chirality_square = 0.0;
  double chirality_hermitian = 0.0;
  double chirality_anticommutation = 0.0;
  double max() const;
};
CliffordDefects clifford_defects(const CliffordRep& rep);

}  // namespace adscharge
