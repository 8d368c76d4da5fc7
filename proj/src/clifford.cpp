// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "adscharge/errors.hpp"

namespace adscharge {

namespace {

const Complex I(0.0, 1.0);

CMat pauli(int k) {
  CMat s(2, 2);
  switch (k) {
    case 1:
      s << 0.0, 1.0, 1.0, 0.0;
      break;
    case 2:
      s << 0.0, -I, I, 0.0;
      break;
    default:
      s << 1.0, 0.0, 0.0, -1.0;
      break;
  }
  return s;
}

CMat kron(const CMat& a, const CMat& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

// Generators and chirality for even n = 2m.
void build_even(int n, std::vector<CMat>& gammas, CMat& chirality) {
  gammas.clear();
  chirality = CMat::Identity(1, 1);
  const CMat id2 = CMat::Identity(2, 2);
  for (int m = 0; 2 * m < n; ++m) {
    for (CMat& g : gammas) {
      g = kron(g, id2);
    }
    gammas.push_back(kron(chirality, I * pauli(1)));
    gammas.push_back(kron(chirality, I * pauli(2)));
    chirality = kron(chirality, pauli(3));
  }
}

void check_vector(const CliffordRep& rep, const Vec& x) {
  if (x.size() != rep.n) {
    throw ShapeError("clifford: vector length does not match n");
  }
}

void check_spinor(const CliffordRep& rep, const Spinor& phi) {
  if (phi.size() != rep.dim_spinor) {
    throw ShapeError("clifford: spinor length does not match the module");
  }
}

}  // namespace

std::string clifford_construction_tag() {
  return "kron-pauli-v1: even Gamma'_{2m+1,2m+2} = gamma (x) i sigma_{1,2}, "
         "gamma' = gamma (x) sigma_3; odd c_n = i gamma, doubled "
         "diag(c,-c) with swap chirality";
}

CliffordRep build_rep(int n) {
  if (n < 3) {
    throw InvalidDimensionError("build_rep: n must be at least 3");
  }
  CliffordRep rep;
  rep.n = n;
  rep.construction = clifford_construction_tag();
  if (n % 2 == 0) {
    build_even(n, rep.gammas, rep.chirality);
    rep.dim_spinor = static_cast<int>(rep.chirality.rows());
    return rep;
  }
  std::vector<CMat> base;
  CMat gamma;
  build_even(n - 1, base, gamma);
  base.push_back(I * gamma);
  const int d = static_cast<int>(gamma.rows());
  rep.doubled = true;
  rep.dim_spinor = 2 * d;
  for (const CMat& c : base) {
    CMat g = CMat::Zero(2 * d, 2 * d);
    g.topLeftCorner(d, d) = c;
    g.bottomRightCorner(d, d) = -c;
    rep.gammas.push_back(g);
  }
  rep.chirality = CMat::Zero(2 * d, 2 * d);
  rep.chirality.topRightCorner(d, d) = CMat::Identity(d, d);
  rep.chirality.bottomLeftCorner(d, d) = CMat::Identity(d, d);
  return rep;
}

CliffordRep CliffordRep::conjugated(const CMat& unitary) const {
  if (unitary.rows() != dim_spinor || unitary.cols() != dim_spinor) {
    throw ShapeError("clifford: unitary has the wrong size");
  }
  CliffordRep out = *this;
  const CMat adj = unitary.adjoint();
  for (CMat& g : out.gammas) {
    g = unitary * g * adj;
  }
  out.chirality = unitary * chirality * adj;
  out.construction = construction + " (unitarily conjugated)";
  return out;
}

CMat CliffordRep::clifford_matrix(const Vec& x) const {
  check_vector(*this, x);
  CMat c = CMat::Zero(dim_spinor, dim_spinor);
  for (int i = 0; i < n; ++i) {
    if (x(i) != 0.0) {
      c += x(i) * gammas[static_cast<std::size_t>(i)];
    }
  }
  return c;
}

Spinor clifford_mul(const CliffordRep& rep, const Vec& x, const Spinor& phi) {
  check_vector(rep, x);
  check_spinor(rep, phi);
  Spinor out = Spinor::Zero(rep.dim_spinor);
  for (int i = 0; i < rep.n; ++i) {
    out += x(i) * (rep.gammas[static_cast<std::size_t>(i)] * phi);
  }
  return out;
}

std::pair<Spinor, Spinor> boundary_projections(const CliffordRep& rep,
                                               const Vec& nu,
                                               const Spinor& phi) {
  check_vector(rep, nu);
  check_spinor(rep, phi);
  if (std::abs(nu.norm() - 1.0) > 1e-12) {
    throw NormalizationError("boundary_projections: nu must be a unit vector");
  }
  const Spinor t = clifford_mul(rep, nu, rep.chirality * phi);
  return {0.5 * (phi + t), 0.5 * (phi - t)};
}

CMat curvature_endomorphism_matrix(const CliffordRep& rep, double mu,
                                   double varpi, const Vec& j) {
  check_vector(rep, j);
  const double shift = mu + 0.5 * rep.n * (rep.n - 1);
  const CMat id = CMat::Identity(rep.dim_spinor, rep.dim_spinor);
  return 0.5 * (shift * id + varpi * rep.chirality +
                rep.clifford_matrix(j) * rep.chirality);
}

Spinor curvature_endomorphism(const CliffordRep& rep, double mu, double varpi,
                              const Vec& j, const Spinor& phi) {
  check_spinor(rep, phi);
  return curvature_endomorphism_matrix(rep, mu, varpi, j) * phi;
}

double curvature_endomorphism_lower_bound(int n, double mu, double varpi,
                                          const Vec& j) {
  return 0.5 *
         (mu + 0.5 * n * (n - 1) - std::sqrt(j.squaredNorm() + varpi * varpi));
}

double CliffordDefects::max() const {
  return std::max({anticommutation, skew_hermitian, chirality_square,
                   chirality_hermitian, chirality_anticommutation});
}

CliffordDefects clifford_defects(const CliffordRep& rep) {
  CliffordDefects d;
  const CMat id = CMat::Identity(rep.dim_spinor, rep.dim_spinor);
  auto norm = [](const CMat& m) { return m.cwiseAbs().maxCoeff(); };
  for (int i = 0; i < rep.n; ++i) {
    const CMat& gi = rep.gammas[static_cast<std::size_t>(i)];
    for (int j = 0; j < rep.n; ++j) {
      const CMat& gj = rep.gammas[static_cast<std::size_t>(j)];
      const CMat target = i == j ? CMat(-2.0 * id) : CMat(CMat::Zero(id.rows(), id.cols()));
      d.anticommutation = std::max(d.anticommutation, norm(gi * gj + gj * gi - target));
    }
    d.skew_hermitian = std::max(d.skew_hermitian, norm(gi.adjoint() + gi));
    d.chirality_anticommutation =
        std::max(d.chirality_anticommutation,
                 norm(gi * rep.chirality + rep.chirality * gi));
  }
  d.chirality_square = norm(rep.chirality * rep.chirality - id);
  d.chirality_hermitian = norm(rep.chirality.adjoint() - rep.chirality);
  return d;
}

}  // namespace adscharge
