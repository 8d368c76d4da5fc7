// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/charges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

namespace {

const Complex I(0.0, 1.0);

// KID-independent ingredients of the integrand at a point.
struct Blocks {
  Mat b;
  Mat binv;
  Vec div_minus_dtr;
  Mat e;
  double tr_e = 0.0;
  Mat k;
  double tr_k = 0.0;
  Vec e_field;
};

Blocks blocks_at(const InitialData& data, const Point& y) {
  const int n = data.n;
  Blocks bl;
  bl.b = background_metric(y);
  bl.binv = background_inverse(y);
  const Tensor et = data.e->value(y);
  bl.e = et.as_mat();
  const Tensor d = covariant_derivative_b(et, data.e->derivative(y),
                                          Variance::Covariant, y);
  bl.div_minus_dtr = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        s += bl.binv(i, k) * (d(i, j, k) - d(i, k, j));
      }
    }
    bl.div_minus_dtr(j) = s;
  }
  bl.tr_e = (bl.binv.cwiseProduct(bl.e)).sum();
  bl.k = data.K->value(y).as_mat();
  bl.tr_k = (bl.binv.cwiseProduct(bl.k)).sum();
  bl.e_field = data.E->value(y).as_vec();
  return bl;
}

double flip(IntegrandMutation m, IntegrandMutation which) {
  return m == which ? -1.0 : 1.0;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

IntegrandValue integrand_U(const Kid& kid, const InitialData& data,
                           const Point& y, IntegrandMutation mutation) {
  const int n = data.n;
  const Blocks bl = blocks_at(data, y);
  IntegrandValue out;
  out.u1 = Vec::Zero(n);
  out.u2 = Vec::Zero(n);
  out.u3 = Vec::Zero(n);
  if (kid.V) {
    const double v = kid.V->value(y).as_scalar();
    const Vec dv = kid.V->derivative(y).as_vec();
    out.u1 = v * bl.div_minus_dtr - bl.e * (bl.binv * dv) + bl.tr_e * dv;
    out.u1 *= flip(mutation, IntegrandMutation::FlipU1);
  }
  if (kid.alpha) {
    const Vec a = kid.alpha->value(y).as_vec();
    out.u2 = 2.0 * (bl.k * (bl.binv * a) - bl.tr_k * a);
    out.u2 *= flip(mutation, IntegrandMutation::FlipU2);
  }
  out.u3 = 2.0 * (n - 1) * kid.f * (bl.b * bl.e_field);
  out.u3 *= flip(mutation, IntegrandMutation::FlipU3);
  return out;
}

FitResult fit_exponential_tail(const std::vector<double>& radii,
                               const std::vector<double>& values,
                               double sigma) {
  const std::size_t m = radii.size();
  if (m != values.size() || m < 3) {
    throw ShapeError("fit_exponential_tail: need at least three radii");
  }
  auto solve = [&](std::size_t first, double& a, double& c) {
    const double r_last = radii.back();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double cnt = static_cast<double>(m - first);
    for (std::size_t k = first; k < m; ++k) {
      const double x = std::exp(-sigma * (radii[k] - r_last));
      sx += x;
      sy += values[k];
      sxx += x * x;
      sxy += x * values[k];
    }
    const double det = cnt * sxx - sx * sx;
    if (!(std::abs(det) > 0.0)) {
      a = sy / cnt;
      c = 0.0;
      return;
    }
    c = (cnt * sxy - sx * sy) / det;
    a = (sy - c * sx) / cnt;
  };
  FitResult fit;
  fit.sigma = sigma;
  solve(0, fit.limit, fit.amplitude);
  double ss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double model =
        fit.limit + fit.amplitude * std::exp(-sigma * (radii[k] - radii.back()));
    ss += (values[k] - model) * (values[k] - model);
  }
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  if (m >= 4) {
    double a2 = 0.0, c2 = 0.0;
    solve(1, a2, c2);
    fit.shift = std::abs(a2 - fit.limit);
  }
  fit.uncertainty = std::max(fit.residual, fit.shift) +
                    64.0 * std::numeric_limits<double>::epsilon() * max_abs(values);
  return fit;
}

double calibrate_sigma(const std::vector<double>& radii,
                       const std::vector<std::vector<double>>& series,
                       double lo, double hi, double min_relative_scale) {
  double global = 0.0;
  for (const auto& s : series) {
    global = std::max(global, max_abs(s));
  }
  std::vector<std::pair<const std::vector<double>*, double>> active;
  for (const auto& s : series) {
    const double scale = max_abs(s);
    if (scale > min_relative_scale * global && scale > 0.0) {
      active.emplace_back(&s, scale);
    }
  }
  if (active.empty()) {
    return lo;
  }
  auto cost = [&](double sigma) {
    double c = 0.0;
    for (const auto& [s, scale] : active) {
      const FitResult f = fit_exponential_tail(radii, *s, sigma);
      c += (f.residual / scale) * (f.residual / scale);
    }
    return c;
  };
  const int grid = 240;
  const double ratio = std::log(hi / lo) / grid;
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid; ++k) {
    const double c = cost(lo * std::exp(ratio * k));
    if (c < best_cost) {
      best_cost = c;
      best = k;
    }
  }
  // Golden-section refinement in log(sigma) around the best grid point.
  double a = std::log(lo) + ratio * std::max(0, best - 1);
  double b = std::log(lo) + ratio * std::min(grid, best + 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = cost(std::exp(x1));
  double f2 = cost(std::exp(x2));
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = cost(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = cost(std::exp(x2));
    }
  }
  const double refined = std::exp(0.5 * (a + b));
  return cost(refined) <= best_cost ? refined : lo * std::exp(ratio * best);
}

ChargeEvaluator::ChargeEvaluator(InitialData data, ChargeOptions options)
    : data_(std::move(data)), options_(std::move(options)) {
  data_.validate();
  const int n = data_.n;
  const auto& radii = data_.chart.radial_nodes;
  if (radii.size() < options_.min_radii) {
    throw DomainError("charges: the radial ladder needs at least " +
                      std::to_string(options_.min_radii) + " radii");
  }
  if (!options_.waive_decay) {
    decay_ = decay_verification(data_, data_.tau, options_.decay);
    decay_ok_ = decay_.verdict == Verdict::Pass;
  } else {
    decay_.tau = data_.tau;
    decay_.verdict = Verdict::Inconclusive;
    decay_.reason = "waived";
  }

  const SphereRule& rule = data_.chart.sphere;
  nodes_.resize(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    nodes_[k] = make_ring(radii[k], rule);
  }
  if (options_.quadrature_check_extra > 0) {
    check_ring_ = make_ring(radii.back(),
                            make_sphere_rule(n, rule.degree + options_.quadrature_check_extra));
  }

  // One sigma for the whole data set, from the basis KIDs.
  std::vector<std::vector<double>> series;
  for (int mu = 0; mu <= n; ++mu) {
    series.push_back(raw_integrals(potential_kid(n, mu)));
  }
  series.push_back(raw_integrals(constant_kid(n)));
  if (!data_.time_symmetric) {
    for (const Kid& kid : killing_field_basis(n)) {
      series.push_back(raw_integrals(kid));
    }
  }
  for (const auto& s : series) {
    global_scale_ = std::max(global_scale_, max_abs(s));
  }
  const double lo =
      std::max(0.05, data_.tau - (n - 1) - options_.sigma_margin);
  const double hi = std::max(options_.sigma_max, 2.0 * lo);
  sigma_ = calibrate_sigma(radii, series, lo, hi);
}

std::vector<ChargeEvaluator::Node> ChargeEvaluator::make_ring(
    double r, const SphereRule& rule) const {
  const int n = data_.n;
  const IntegrandMutation mut = options_.mutation;
  const double measure = std::pow(std::sinh(r), n - 1);
  std::vector<Node> ring;
  ring.reserve(rule.size());
  for (std::size_t a = 0; a < rule.size(); ++a) {
    Node node;
    node.y = r * rule.nodes[a];
    const Vec nu = rule.nodes[a];
    const Blocks bl = blocks_at(data_, node.y);
    node.weight = rule.weights[a] * measure;
    node.s1 = flip(mut, IntegrandMutation::FlipU1) * bl.div_minus_dtr.dot(nu);
    node.p = flip(mut, IntegrandMutation::FlipU1) *
             (bl.tr_e * nu - bl.binv * (bl.e * nu));
    node.q = flip(mut, IntegrandMutation::FlipU2) * 2.0 *
             (bl.binv * (bl.k * nu) - bl.tr_k * nu);
    // b nu = nu exactly for the unit radial direction; multiplying by the
    // matrix b instead loses digits to its sinh^2 r / r^2 angular block.
    node.flux = nu.dot(bl.e_field);
    node.e3 = flip(mut, IntegrandMutation::FlipU3) * 2.0 * (n - 1) * node.flux;
    for (double v : {node.s1, node.flux}) {
      if (!std::isfinite(v)) {
        throw PropagationError("charges: non-finite integrand at angular node " +
                                   std::to_string(a) + " of radius " +
                                   std::to_string(r),
                               a);
      }
    }
    ring.push_back(std::move(node));
  }
  return ring;
}

double ChargeEvaluator::normalization() const {
  return 1.0 / (2.0 * (data_.n - 1) * sphere_area(data_.n));
}

double ChargeEvaluator::flux_normalization() const {
  return 1.0 / sphere_area(data_.n);
}

double ChargeEvaluator::ring_integral(const std::vector<Node>& ring,
                                     const Kid& kid) const {
  std::vector<double> terms(ring.size(), 0.0);
  for (std::size_t a = 0; a < ring.size(); ++a) {
    const Node& node = ring[a];
    double v = kid.f * node.e3;
    if (kid.V) {
      v += kid.V->value(node.y).as_scalar() * node.s1 +
           kid.V->derivative(node.y).as_vec().dot(node.p);
    }
    if (kid.alpha) {
      v += kid.alpha->value(node.y).as_vec().dot(node.q);
    }
    if (!std::isfinite(v)) {
      throw PropagationError(
          "charges: non-finite KID sample at angular node " + std::to_string(a), a);
    }
    terms[a] = node.weight * v;
  }
  return pairwise_sum(terms);
}

std::vector<double> ChargeEvaluator::raw_integrals(const Kid& kid) const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (const auto& ring : nodes_) {
    out.push_back(ring_integral(ring, kid));
  }
  return out;
}

double ChargeEvaluator::quadrature_error(const Kid& kid,
                                         const std::vector<double>& raw) const {
  if (check_ring_.empty()) {
    return 0.0;
  }
  return std::abs(ring_integral(check_ring_, kid) - raw.back());
}

XiResult ChargeEvaluator::extrapolate(const std::vector<double>& raw,
                                      double normalization,
                                      double quadrature_raw) const {
  XiResult res;
  res.radii = data_.chart.radial_nodes;
  res.raw = raw;
  for (double v : raw) {
    res.normalized.push_back(normalization * v);
  }
  res.fit = fit_exponential_tail(res.radii, raw, sigma_);
  res.value = normalization * res.fit.limit;
  res.quadrature_error = std::abs(normalization) * quadrature_raw;
  res.uncertainty =
      std::abs(normalization) * (res.fit.uncertainty + quadrature_raw);
  if (!decay_ok_) {
    res.reliable = false;
    res.warning = "decay verification did not pass: " + decay_.reason;
  }
  const double scale = std::max(max_abs(raw), global_scale_);
  if (res.fit.uncertainty > options_.divergence_threshold * scale) {
    res.reliable = false;
    if (!res.warning.empty()) {
      res.warning += "; ";
    }
    res.warning += "radial fit did not converge (uncertainty above threshold)";
  } else if (quadrature_raw > options_.divergence_threshold * scale) {
    res.reliable = false;
    if (!res.warning.empty()) {
      res.warning += "; ";
    }
    res.warning += "angular quadrature not resolved (refined rule disagrees)";
  }
  return res;
}

XiResult ChargeEvaluator::xi(const Kid& kid) const {
  const std::vector<double> raw = raw_integrals(kid);
  return extrapolate(raw, normalization(), quadrature_error(kid, raw));
}

XiResult ChargeEvaluator::electric_charge_direct() const {
  auto flux = [](const std::vector<Node>& ring) {
    std::vector<double> terms(ring.size(), 0.0);
    for (std::size_t a = 0; a < ring.size(); ++a) {
      terms[a] = ring[a].weight * ring[a].flux;
    }
    return pairwise_sum(terms);
  };
  std::vector<double> raw;
  for (const auto& ring : nodes_) {
    raw.push_back(flux(ring));
  }
  const double quad =
      check_ring_.empty() ? 0.0 : std::abs(flux(check_ring_) - raw.back());
  return extrapolate(raw, flux_normalization(), quad);
}

std::vector<CMat> ChargeEvaluator::spinor_form_raw(const CliffordRep& rep) const {
  if (rep.n != data_.n) {
    throw ShapeError("spinor form: module dimension does not match the data");
  }
  std::vector<CMat> out;
  for (const auto& ring : nodes_) {
    out.push_back(spinor_ring_form(rep, ring));
  }
  return out;
}

std::optional<CMat> ChargeEvaluator::spinor_form_check(const CliffordRep& rep) const {
  if (check_ring_.empty()) {
    return std::nullopt;
  }
  return spinor_ring_form(rep, check_ring_);
}

CMat ChargeEvaluator::spinor_ring_form(const CliffordRep& rep,
                                       const std::vector<Node>& ring) const {
  const int n = rep.n;
  const int d = rep.dim_spinor;
  const CMat id = CMat::Identity(d, d);
  std::vector<CMat> gg;  // Gamma_k chirality
  for (const CMat& g : rep.gammas) {
    gg.push_back(g * rep.chirality);
  }
  CMat w = CMat::Zero(d, d);
  for (const Node& node : ring) {
    const double r = node.y.norm();
    const double omega = ball_conformal_factor(r);
    const Mat jac = ball_jacobian(node.y);
    const Point x = ball_point(node.y);
    const double rs = 1.0 / std::sqrt(omega);
    const CMat base = id - I * rep.clifford_matrix(x);
    const CMat z = rs * base;
    const CMat zh = z.adjoint();
    const Vec jp = jac * node.p;
    const Vec jq = jac * node.q;
    CMat m = node.s1 * (zh * z) + (2.0 * node.e3) * rep.chirality;
    for (int k = 0; k < n; ++k) {
      const CMat& gk = rep.gammas[static_cast<std::size_t>(k)];
      if (jp(k) != 0.0) {
        const CMat dz = (0.5 * rs / omega * x(k)) * base - (I * rs) * gk;
        const CMat dv = dz.adjoint() * z + zh * dz;
        m += jp(k) * dv;
      }
      if (jq(k) != 0.0) {
        m += (jq(k) / omega) * (zh * gg[static_cast<std::size_t>(k)] * z);
      }
    }
    w += node.weight * m;
  }
  return w;
}

ChargeReport mass_vector(const ChargeEvaluator& ev) {
  const int n = ev.n();
  ChargeReport rep;
  rep.n = n;
  rep.m_mu = Vec::Zero(n + 1);
  rep.sigma = ev.sigma();
  rep.radii = ev.data().chart.radial_nodes;
  rep.decay = ev.decay();
  auto record = [&](const std::string& label, const XiResult& res) {
    if (!res.reliable) {
      rep.reliable = false;
      rep.warnings.push_back(label + ": " + res.warning);
    }
    rep.details.push_back({label, res});
  };
  for (int mu = 0; mu <= n; ++mu) {
    const Kid kid = potential_kid(n, mu);
    const XiResult res = ev.xi(kid);
    rep.m_mu(mu) = res.value;
    rep.max_uncertainty = std::max(rep.max_uncertainty, res.uncertainty);
    record("m_(" + std::to_string(mu) + ")", res);
  }
  for (const Kid& kid : killing_field_basis(n)) {
    const XiResult res = ev.xi(kid);
    rep.killing_charges.push_back(res.value);
    rep.killing_labels.push_back(kid.label);
    record(kid.label, res);
  }
  const XiResult q = ev.xi(constant_kid(n));
  rep.Q = q.value;
  rep.max_uncertainty = std::max(rep.max_uncertainty, q.uncertainty);
  record("Q", q);
  const XiResult qd = ev.electric_charge_direct();
  rep.Q_direct = qd.value;
  record("Q_direct", qd);
  rep.m = std::sqrt(std::abs(eta_inner(rep.m_mu, rep.m_mu)));
  rep.causal_class = causal_class(rep.m_mu);
  rep.causal_future = is_causal_future(rep.m_mu);
  return rep;
}

ChargeReport mass_vector(const InitialData& data, const ChargeOptions& options) {
  return mass_vector(ChargeEvaluator(data, options));
}

XiResult electric_charge(const ChargeEvaluator& ev) {
  return ev.xi(constant_kid(ev.n()));
}

PositivityMatrix positivity_matrix(const Vec& m_mu, double Q,
                                   const CliffordRep& rep) {
  if (m_mu.size() != rep.n + 1) {
    throw ShapeError("positivity_matrix: m_mu must have n+1 entries");
  }
  const int d = rep.dim_spinor;
  PositivityMatrix pm;
  pm.M = m_mu(0) * CMat::Identity(d, d) + Q * rep.chirality;
  for (int j = 1; j <= rep.n; ++j) {
    pm.M -= (I * m_mu(j)) * rep.gammas[static_cast<std::size_t>(j - 1)];
  }
  const double herm = (pm.M - pm.M.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12 * std::max(1.0, pm.M.cwiseAbs().maxCoeff())) {
    throw ConsistencyError("positivity_matrix: result is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(pm.M);
  pm.min_eig = eig.eigenvalues()(0);
  pm.min_vector = eig.eigenvectors().col(0);
  return pm;
}

double positivity_closed_form(const Vec& m_mu, double Q) {
  return m_mu(0) - std::sqrt(m_mu.tail(m_mu.size() - 1).squaredNorm() + Q * Q);
}

ConeScan cone_positivity_scan(const ChargeEvaluator& ev, const CliffordRep& rep,
                              int samples, std::uint64_t seed,
                              const ChargeReport* report) {
  if (samples < 0) {
    throw DomainError("cone scan: samples must be non-negative");
  }
  const int d = rep.dim_spinor;
  const std::vector<CMat> raw = ev.spinor_form_raw(rep);
  CMat w(d, d);
  Mat unc = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      std::vector<double> re, im;
      for (const CMat& m : raw) {
        re.push_back(m(a, b).real());
        im.push_back(m(a, b).imag());
      }
      const XiResult fr = ev.extrapolate(re, ev.normalization());
      const XiResult fi = ev.extrapolate(im, ev.normalization());
      w(a, b) = Complex(fr.value, fi.value);
      unc(a, b) = std::hypot(fr.uncertainty, fi.uncertainty);
    }
  }
  w = 0.5 * (w + w.adjoint()).eval();

  ConeScan scan;
  scan.samples = samples;
  scan.form = w;
  scan.fit_budget = unc.norm();
  if (const auto fine = ev.spinor_form_check(rep)) {
    scan.quadrature_budget =
        std::abs(ev.normalization()) * (*fine - raw.back()).norm();
  }
  scan.budget = scan.fit_budget + scan.quadrature_budget + 1e-12;
  scan.time_symmetric = ev.data().time_symmetric;
  scan.sampled_min = std::numeric_limits<double>::infinity();
  auto consider = [&](const Spinor& u) {
    const double v = u.dot(w * u).real();
    if (v < scan.sampled_min) {
      scan.sampled_min = v;
      scan.worst_u = u;
    }
  };
  for (int a = 0; a < d; ++a) {
    consider(Spinor::Unit(d, a));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Spinor u(d);
    for (int a = 0; a < d; ++a) {
      u(a) = Complex(normal(rng), normal(rng));
    }
    consider(u / u.norm());
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(w);
  scan.certified_min = eig.eigenvalues()(0);
  scan.certificate_u = eig.eigenvectors().col(0);
  scan.worst_direct = ev.xi(kid_from_spinor(rep, scan.worst_u)).value;
  scan.certificate_direct = ev.xi(kid_from_spinor(rep, scan.certificate_u)).value;
  if (scan.time_symmetric && report != nullptr) {
    const PositivityMatrix pm = positivity_matrix(report->m_mu, report->Q, rep);
    scan.matrix_gap = (w - 2.0 * pm.M).cwiseAbs().maxCoeff();
    scan.worst_gap = std::abs(
        scan.worst_direct - 2.0 * scan.worst_u.dot(pm.M * scan.worst_u).real());
  }
  return scan;
}

}  // namespace adscharge
