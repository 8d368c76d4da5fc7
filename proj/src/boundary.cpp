// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

void BoundaryData::validate() const {
  if (!(vol > 0.0)) {
    throw DomainError("boundary: volume must be positive");
  }
  for (const BoundaryNode& node : nodes) {
    if (std::abs(node.nu_frame.norm() - 1.0) > 1e-10) {
      throw NormalizationError("boundary: normal is not g-unit");
    }
  }
}

double round_yamabe(int n) {
  if (n < 3) {
    throw InvalidDimensionError("round_yamabe: n must be at least 3");
  }
  return (n - 1) * (n - 2) * std::pow(sphere_area(n), 2.0 / (n - 1));
}

namespace {

struct LevelSetGeometry {
  BoundaryNode node;
  double area_density = 0.0;  ///< sqrt(det g) |dr|_g rho^{n-1}
};

LevelSetGeometry level_set_point(const InitialData& data, const FieldPtr& metric,
                                 const Point& y) {
  const int n = data.n;
  const double rho = y.norm();
  const Vec yhat = y / rho;
  const Mat g = data.g(y);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw DegenerateMetricError("boundary: metric is not positive definite");
  }
  const Mat ginv = llt.solve(Mat::Identity(n, n));
  const Tensor dg = metric->derivative(y);

  const Vec big_n = ginv * yhat;
  const double lambda = std::sqrt(yhat.dot(big_n));
  const Vec nu = big_n / lambda;

  // d nu^i / dy^k from N = g^{-1} yhat and lambda = |dr|_g.
  double div_nu = 0.0;
  double log_det_term = 0.0;
  for (int k = 0; k < n; ++k) {
    Mat dgk(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        dgk(a, b) = dg(a, b, k);
      }
    }
    Vec dyhat = -yhat(k) * yhat / rho;
    dyhat(k) += 1.0 / rho;
    const Vec dn = -ginv * (dgk * big_n) + ginv * dyhat;
    const double dlambda = (dyhat.dot(big_n) + yhat.dot(dn)) / (2.0 * lambda);
    div_nu += dn(k) / lambda - big_n(k) * dlambda / (lambda * lambda);
    log_det_term += 0.5 * (ginv.cwiseProduct(dgk)).sum() * nu(k);
  }

  const Mat kmat = data.K->value(y).as_mat();
  const Vec e_field = data.E->value(y).as_vec();
  const Mat l = llt.matrixL();

  LevelSetGeometry out;
  BoundaryNode& node = out.node;
  node.y = y;
  node.nu = nu;
  node.nu_frame = l.transpose() * nu;
  node.H = div_nu + log_det_term;
  const Mat h_inv = ginv - nu * nu.transpose();
  node.tr_K = (h_inv.cwiseProduct(kmat)).sum();
  const Vec k_nu = kmat * nu;
  node.k_nn = k_nu.dot(nu);
  node.k_tangential_norm = std::sqrt(std::max(0.0, k_nu.dot(h_inv * k_nu)));
  const Vec k_frame = l.triangularView<Eigen::Lower>().solve(k_nu);
  node.k_tangential_frame = k_frame - k_frame.dot(node.nu_frame) * node.nu_frame;
  // g nu = yhat / lambda.
  node.E_nu = e_field.dot(yhat) / lambda;
  node.dr_norm = lambda;
  out.area_density =
      std::sqrt(g.determinant()) * lambda * std::pow(rho, n - 1);
  return out;
}

double level_set_volume(const InitialData& data, const SphereRule& rule,
                        double rho) {
  std::vector<double> terms(rule.size());
  for (std::size_t a = 0; a < rule.size(); ++a) {
    const Point y = rho * rule.nodes[a];
    const Mat g = data.g(y);
    const Vec yhat = rule.nodes[a];
    const double lambda = std::sqrt(yhat.dot(g.ldlt().solve(yhat)));
    terms[a] = rule.weights[a] * std::sqrt(g.determinant()) * lambda *
               std::pow(rho, data.n - 1);
  }
  return pairwise_sum(terms);
}

SphereRule boundary_rule(const InitialData& data, const BoundaryOptions& options) {
  return options.degree < 0 ? data.chart.sphere
                            : make_sphere_rule(data.n, options.degree);
}

}  // namespace

BoundaryData level_set_boundary(const InitialData& data, double rho,
                                const BoundaryOptions& options) {
  if (!(rho > 0.0)) {
    throw DomainError("boundary: level-set radius must be positive");
  }
  const int n = data.n;
  const SphereRule rule = boundary_rule(data, options);
  const FieldPtr metric = data.metric_field();
  BoundaryData bd;
  bd.n = n;
  bd.component = options.component;
  bd.rho = rho;
  bd.time_symmetric = data.time_symmetric;
  bd.round_class = options.round_class;
  bd.yamabe = options.yamabe;
  if (!bd.yamabe && options.round_class) {
    bd.yamabe = round_yamabe(n);
  }
  std::vector<double> areas(rule.size());
  for (std::size_t a = 0; a < rule.size(); ++a) {
    LevelSetGeometry geo = level_set_point(data, metric, rho * rule.nodes[a]);
    geo.node.weight = rule.weights[a] * geo.area_density;
    areas[a] = geo.node.weight;
    if (!std::isfinite(geo.node.H) || !std::isfinite(geo.node.E_nu)) {
      throw PropagationError(
          "boundary: non-finite value at node " + std::to_string(a), a);
    }
    bd.nodes.push_back(std::move(geo.node));
  }
  bd.vol = pairwise_sum(areas);
  bd.validate();
  return bd;
}

BoundaryNode boundary_node(const Vec& nu_frame, double H, double tr_K,
                           const Vec& k_tangential_frame, double E_nu,
                           double weight) {
  if (std::abs(nu_frame.norm() - 1.0) > 1e-12) {
    throw NormalizationError("boundary_node: nu must be a unit vector");
  }
  if (std::abs(k_tangential_frame.dot(nu_frame)) >
      1e-12 * std::max(1.0, k_tangential_frame.norm())) {
    throw ShapeError("boundary_node: K(nu)^T must be orthogonal to nu");
  }
  BoundaryNode node;
  node.nu = nu_frame;
  node.nu_frame = nu_frame;
  node.H = H;
  node.tr_K = tr_K;
  node.k_tangential_frame = k_tangential_frame;
  node.k_tangential_norm = k_tangential_frame.norm();
  node.E_nu = E_nu;
  node.weight = weight;
  return node;
}

AreaVariationCheck area_variation_check(const InitialData& data, double rho,
                                        const BoundaryOptions& options,
                                        double h) {
  const SphereRule rule = boundary_rule(data, options);
  auto central = [&](double step) {
    return (level_set_volume(data, rule, rho + step) -
            level_set_volume(data, rule, rho - step)) /
           (2.0 * step);
  };
  AreaVariationCheck out;
  out.finite_difference = (4.0 * central(0.5 * h) - central(h)) / 3.0;
  const BoundaryData bd = level_set_boundary(data, rho, options);
  std::vector<double> terms;
  for (const BoundaryNode& node : bd.nodes) {
    terms.push_back(node.weight * node.H / node.dr_norm);
  }
  out.predicted = pairwise_sum(terms);
  out.relative_gap = std::abs(out.finite_difference - out.predicted) /
                     std::max(std::abs(out.predicted), 1e-300);
  return out;
}

Expansions null_expansions(const BoundaryData& bd) {
  Expansions ex;
  ex.future_trapped = !bd.nodes.empty();
  ex.past_trapped = !bd.nodes.empty();
  for (const BoundaryNode& node : bd.nodes) {
    const double tp = node.H + node.tr_K;
    const double tm = node.H - node.tr_K;
    ex.theta_plus.push_back(tp);
    ex.theta_minus.push_back(tm);
    ex.future_trapped = ex.future_trapped && tp <= 0.0;
    ex.past_trapped = ex.past_trapped && tm <= 0.0;
  }
  return ex;
}

double h_max(int n, double H, double tr_K, double k_tangential_norm,
             double E_nu) {
  const double e = (n - 1) * E_nu;
  return H + std::sqrt(tr_K * tr_K + k_tangential_norm * k_tangential_norm +
                       e * e);
}

std::vector<double> h_max(const BoundaryData& bd) {
  std::vector<double> out;
  out.reserve(bd.nodes.size());
  for (const BoundaryNode& node : bd.nodes) {
    out.push_back(
        h_max(bd.n, node.H, node.tr_K, node.k_tangential_norm, node.E_nu));
  }
  return out;
}

std::string to_string(AdmissibilityMode mode) {
  switch (mode) {
    case AdmissibilityMode::TrappedA:
      return "trapped_a";
    case AdmissibilityMode::YamabeB:
      return "yamabe_b";
    case AdmissibilityMode::TsA:
      return "ts_a";
    default:
      return "ts_b";
  }
}

AdmissibilityMode parse_admissibility_mode(const std::string& name) {
  for (auto m : {AdmissibilityMode::TrappedA, AdmissibilityMode::YamabeB,
                 AdmissibilityMode::TsA, AdmissibilityMode::TsB}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw ConfigError("unknown boundary mode '" + name + "'");
}

double dirac_bound_rhs(int n, double yamabe, double vol) {
  if (!(yamabe > 0.0)) {
    throw HypothesisError("boundary: the Yamabe invariant must be positive");
  }
  if (!(vol > 0.0)) {
    throw DomainError("boundary: volume must be positive");
  }
  return (n - 1) / (4.0 * (n - 2)) * yamabe / std::pow(vol, 2.0 / (n - 1)) +
         0.25 * (n - 1) * (n - 1);
}

double dirac_bound_rhs(const BoundaryData& bd) {
  if (!bd.yamabe) {
    throw HypothesisError("boundary: no Yamabe invariant available");
  }
  return dirac_bound_rhs(bd.n, *bd.yamabe, bd.vol);
}

AdmissibilityReport admissibility(const BoundaryData& bd, AdmissibilityMode mode,
                                  double tolerance) {
  bd.validate();
  const int n = bd.n;
  AdmissibilityReport rep;
  rep.component = bd.component;
  rep.mode = mode;
  if (bd.nodes.empty()) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if ((mode == AdmissibilityMode::TsA || mode == AdmissibilityMode::TsB) &&
      !bd.time_symmetric) {
    throw HypothesisError("boundary: " + to_string(mode) +
                          " needs time-symmetric data");
  }

  if (mode == AdmissibilityMode::TrappedA) {
    // Either theta_+ <= 0 everywhere or theta_- <= 0 everywhere.
    const Expansions ex = null_expansions(bd);
    const double mp = *std::max_element(ex.theta_plus.begin(), ex.theta_plus.end());
    const double mm =
        *std::max_element(ex.theta_minus.begin(), ex.theta_minus.end());
    const bool future = mp <= mm;
    const auto& theta = future ? ex.theta_plus : ex.theta_minus;
    rep.worst_node = static_cast<std::size_t>(
        std::max_element(theta.begin(), theta.end()) - theta.begin());
    rep.lhs = theta[rep.worst_node];
    rep.rhs = 0.0;
  } else if (mode == AdmissibilityMode::TsA) {
    rep.rhs = 0.0;
    rep.lhs = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < bd.nodes.size(); ++a) {
      if (bd.nodes[a].H > rep.lhs) {
        rep.lhs = bd.nodes[a].H;
        rep.worst_node = a;
      }
    }
  } else {
    if (!bd.yamabe) {
      throw HypothesisError("boundary: " + to_string(mode) +
                            " needs the Yamabe invariant");
    }
    const double dirac = dirac_bound_rhs(bd);
    rep.rhs = std::sqrt(*bd.yamabe / ((n - 1) * (n - 2)) /
                            std::pow(bd.vol, 2.0 / (n - 1)) +
                        1.0);
    rep.lhs = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < bd.nodes.size(); ++a) {
      const BoundaryNode& node = bd.nodes[a];
      const double strength =
          mode == AdmissibilityMode::YamabeB
              ? h_max(n, node.H, node.tr_K, node.k_tangential_norm, node.E_nu)
              : node.H + (n - 1) * std::abs(node.E_nu);
      const double lhs = strength / (n - 1);
      if (lhs > rep.lhs) {
        rep.lhs = lhs;
        rep.worst_node = a;
      }
    }
    rep.dirac_gap = std::abs(2.0 / (n - 1) * std::sqrt(dirac) - rep.rhs);
    if (n == 3) {
      rep.reduced_rhs = std::sqrt(4.0 * std::numbers::pi / bd.vol + 1.0);
      rep.reduction_gap = std::abs(*rep.reduced_rhs - rep.rhs);
    }
  }
  rep.margin = rep.rhs - rep.lhs;
  rep.verdict = rep.margin >= -tolerance ? Verdict::Pass : Verdict::Fail;
  return rep;
}

BoundaryPointValues point_values(const BoundaryNode& node) {
  BoundaryPointValues v;
  v.nu = node.nu_frame;
  v.H = node.H;
  v.tr_K = node.tr_K;
  v.k_tangential = node.k_tangential_frame;
  v.E_nu = node.E_nu;
  return v;
}

CMat h_endomorphism_matrix(const CliffordRep& rep, const BoundaryPointValues& v) {
  if (v.nu.size() != rep.n || v.k_tangential.size() != rep.n) {
    throw ShapeError("h_endomorphism: vectors must have n components");
  }
  const int d = rep.dim_spinor;
  const CMat& gamma = rep.chirality;
  return v.H * CMat::Identity(d, d) + v.tr_K * rep.clifford_matrix(v.nu) * gamma -
         rep.clifford_matrix(v.k_tangential) * gamma -
         ((rep.n - 1) * v.E_nu) * gamma;
}

double h_endomorphism_form(const CliffordRep& rep, const BoundaryPointValues& v,
                           const Spinor& phi) {
  if (phi.size() != rep.dim_spinor) {
    throw ShapeError("h_endomorphism: spinor has the wrong dimension");
  }
  return phi.dot(h_endomorphism_matrix(rep, v) * phi).real();
}

}  // namespace adscharge
