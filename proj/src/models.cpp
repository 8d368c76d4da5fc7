// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/models.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double quad_tol = 1e-15;

Mat projector(const Vec& u) {
  const int n = static_cast<int>(u.size());
  return Mat::Identity(n, n) - u * u.transpose();
}

}  // namespace

double maxwell_constant(int n) { return std::sqrt(0.5 * (n - 1.0) * (n - 2.0)); }

Chart default_model_chart(int n, int degree) {
  return Chart::make(n, geometric_ladder(5.0, 11.0, 6),
                     degree > 0 ? degree : default_sphere_degree(n));
}

RnAdsProfile::RnAdsProfile(int n, double mbar, double qbar)
    : n_(n), m_(mbar), q_(qbar) {
  if (n < 3) {
    throw InvalidDimensionError("rn_ads: n must be at least 3");
  }
  if (!(mbar >= 0.0) || !std::isfinite(mbar) || !std::isfinite(qbar)) {
    throw ModelDomainError("rn_ads: need finite mbar >= 0 and finite qbar");
  }
  if (m_ == 0.0 && q_ == 0.0) {
    regime_ = "vacuum";
    return;
  }
  // Largest positive zero of P(s) = s^{2(n-2)} U(s).
  auto p = [this](double s) {
    const double a = std::pow(s, n_ - 2);
    return a * a * (1.0 + s * s) - 2.0 * m_ * a + q_ * q_;
  };
  double hi = 1.0 + 2.0 * m_ + std::abs(q_);
  double found_lo = -1.0;
  double s = hi;
  const int steps = 4000;
  const double factor = std::pow(1e-8 / hi, 1.0 / steps);
  for (int k = 0; k < steps; ++k) {
    const double next = s * factor;
    if (p(next) <= 0.0 && p(s) > 0.0) {
      found_lo = next;
      hi = s;
      break;
    }
    s = next;
  }
  if (found_lo > 0.0) {
    boost::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto bracket =
        boost::math::tools::toms748_solve(p, found_lo, hi, tol, iters);
    s_h_ = bracket.second;
    regime_ = "black_hole";
    // delta(s_h) has an integrable endpoint singularity.
    boost::math::quadrature::tanh_sinh<double> ts;
    const double near = ts.integrate(
        [this](double t) { return integrand(t); }, s_h_, s_h_ + 1.0);
    r_inner_ = std::asinh(s_h_) - (near + delta(s_h_ + 1.0));
  } else {
    if (m_ > 0.0 && q_ == 0.0) {
      throw ModelDomainError("rn_ads: no horizon found");
    }
    regime_ = "naked_singularity";
    s_h_ = 0.0;
    const double head = gauss_kronrod<double, 61>::integrate(
        [this](double t) { return integrand(t); }, 0.0, 1.0, 10, quad_tol);
    r_inner_ = -(head + delta(1.0));
  }
}

double RnAdsProfile::U(double s) const {
  return 1.0 + s * s - 2.0 * m_ / std::pow(s, n_ - 2) +
         q_ * q_ / std::pow(s, 2 * (n_ - 2));
}

// U^{-1/2} - W^{-1/2} with W = 1 + s^2, written without cancellation.
double RnAdsProfile::integrand(double sigma) const {
  const double w = 1.0 + sigma * sigma;
  const double a = std::pow(sigma, n_ - 2);
  const double w_minus_u = 2.0 * m_ / a - q_ * q_ / (a * a);
  const double u = w - w_minus_u;
  if (!(u > 0.0)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  const double su = std::sqrt(u);
  const double sw = std::sqrt(w);
  return w_minus_u / (su * sw * (su + sw));
}

double RnAdsProfile::delta(double s) const {
  if (m_ == 0.0 && q_ == 0.0) {
    return 0.0;
  }
  // sigma = s / t maps (s, oo) to (0, 1).
  auto f = [this, s](double t) {
    if (t <= 0.0) {
      return 0.0;
    }
    return integrand(s / t) * s / (t * t);
  };
  // The integrand is smooth, so one 61-point panel is already at roundoff; a
  // deep bisection only chases a tolerance the error estimate cannot reach
  // (seconds per call at unlucky s).
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 6, quad_tol);
}

RnAdsProfile::Sample RnAdsProfile::at(double r_in) const {
  // |r xhat| jitters in the last bits from node to node on one sphere; snap
  // to a 2^-44 lattice so a sphere shares one profile solve.
  const double r = std::ldexp(std::round(std::ldexp(r_in, 44)), -44);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = cache_.find(r);
    if (it != cache_.end()) {
      return it->second;
    }
  }
  const Sample smp = compute(r);
  std::lock_guard<std::mutex> lock(mutex_);
  if (cache_.size() > 20000) {
    cache_.clear();
  }
  cache_.emplace(r, smp);
  return smp;
}

RnAdsProfile::Sample RnAdsProfile::compute(double r) const {
  if (!(r > r_inner_)) {
    throw ModelDomainError("rn_ads: radius outside the exterior domain");
  }
  Sample out;
  out.r = r;
  if (m_ == 0.0 && q_ == 0.0) {
    out.s = std::sinh(r);
    out.sqrt_u = std::cosh(r);
    return out;
  }
  // Newton on asinh(s) - delta(s) - r with d/ds = U^{-1/2}.
  double s = std::max(std::sinh(r), s_h_ * (1.0 + 1e-6) + 1e-300);
  double d = 0.0;
  const double g_tol = 8.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, r);
  for (int it = 0; it < 60; ++it) {
    d = delta(s);
    const double g = std::asinh(s) - d - r;
    if (std::abs(g) <= g_tol) {
      break;
    }
    double next = s - g * std::sqrt(U(s));
    if (!(next > s_h_)) {
      next = 0.5 * (s + s_h_);
    }
    s = next;
  }
  out.s = s;
  out.delta = d;
  const double w = 1.0 + s * s;
  const double a = std::pow(s, n_ - 2);
  const double u_minus_w = -2.0 * m_ / a + q_ * q_ / (a * a);
  const double sqrt_u = std::sqrt(w + u_minus_w);
  out.sqrt_u = sqrt_u;
  out.area_deficit = std::sinh(2.0 * r + d) * std::sinh(d);
  out.area_deficit_d =
      2.0 * (s * u_minus_w / (sqrt_u + std::sqrt(w)) +
             std::cosh(2.0 * r + d) * std::sinh(d));
  // s'' = U'(s) / 2 gives A'' = 4 A + 2 D + s D' with D = U - W.
  out.area_deficit_dd = 4.0 * out.area_deficit + 2.0 * u_minus_w +
                        2.0 * (n_ - 2) * (m_ / a - q_ * q_ / (a * a));
  out.field = q_ / std::pow(s, n_ - 1);
  out.field_d = -(n_ - 1) * q_ / std::pow(s, n_) * sqrt_u;
  return out;
}

InitialData hyperbolic_data(const Chart& chart) {
  const int n = chart.n;
  InitialData d = make_initial_data(
      chart, zero_field(n, 2), zero_field(n, 2),
      zero_field(n, 1, Variance::Contravariant), static_cast<double>(n),
      "hyperbolic");
  d.time_symmetric = true;
  return d;
}

InitialData hyperbolic_data(int n) {
  return hyperbolic_data(default_model_chart(n));
}

InitialData rn_ads_data(const Chart& chart, double mbar, double qbar) {
  const int n = chart.n;
  auto prof = std::make_shared<const RnAdsProfile>(n, mbar, qbar);
  if (!chart.radial_nodes.empty() && !(chart.radial_nodes.front() > prof->r_inner())) {
    throw ModelDomainError("rn_ads: chart reaches the inner end of the exterior");
  }
  // e = (A / r^2) (delta - yhat yhat^T).
  auto e_value = [prof](const Point& y) {
    const double r = chart_radius(y);
    const auto smp = prof->at(r);
    const Vec u = y / r;
    return Tensor::from_mat(smp.area_deficit / (r * r) * projector(u));
  };
  auto e_deriv = [prof, n](const Point& y) {
    const double r = chart_radius(y);
    const auto smp = prof->at(r);
    const Vec u = y / r;
    const double psi = smp.area_deficit / (r * r);
    const double dpsi = smp.area_deficit_d / (r * r) - 2.0 * psi / r;
    const Mat p = projector(u);
    Tensor t(n, 3);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          t(i, j, k) = dpsi * u(k) * p(i, j) -
                       psi * (p(i, k) * u(j) + u(i) * p(j, k)) / r;
        }
      }
    }
    return t;
  };
  auto e_second = [prof, n](const Point& y) {
    const double r = chart_radius(y);
    const auto smp = prof->at(r);
    const Vec u = y / r;
    const double psi = smp.area_deficit / (r * r);
    const double dpsi = smp.area_deficit_d / (r * r) - 2.0 * psi / r;
    const double ddpsi = smp.area_deficit_dd / (r * r) -
                         4.0 * smp.area_deficit_d / (r * r * r) + 6.0 * psi / (r * r);
    const double phi = psi / r;
    const double dphi = dpsi / r - psi / (r * r);
    const Mat p = projector(u);
    Tensor t(n, 4);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const double dp_ij = -(p(i, l) * u(j) + u(i) * p(j, l)) / r;
            const double d_first =
                (-(p(i, l) * u(k) + u(i) * p(k, l)) * u(j) + p(i, k) * p(j, l)) / r;
            const double d_second =
                (p(i, l) * p(j, k) - u(i) * (p(j, l) * u(k) + u(j) * p(k, l))) / r;
            t(i, j, k, l) = ddpsi * u(l) * u(k) * p(i, j) +
                            dpsi * (p(k, l) / r * p(i, j) + u(k) * dp_ij) -
                            dphi * u(l) * (p(i, k) * u(j) + u(i) * p(j, k)) -
                            phi * (d_first + d_second);
          }
        }
      }
    }
    return t;
  };
  auto e_field_value = [prof](const Point& y) {
    const double r = chart_radius(y);
    return Tensor::from_vec(prof->at(r).field / r * y);
  };
  auto e_field_deriv = [prof](const Point& y) {
    const double r = chart_radius(y);
    const auto smp = prof->at(r);
    const Vec u = y / r;
    return Tensor::from_mat(smp.field_d * u * u.transpose() +
                            smp.field / r * projector(u));
  };
  InitialData d = make_initial_data(
      chart, make_field(n, 2, Variance::Covariant, e_value, e_deriv, e_second),
      zero_field(n, 2),
      make_field(n, 1, Variance::Contravariant, e_field_value, e_field_deriv),
      // The Coulomb field only decays like e^{-(n-1) r}.
      qbar == 0.0 ? static_cast<double>(n) : static_cast<double>(n - 1),
      qbar == 0.0 ? "schwarzschild_ads" : "rn_ads");
  d.time_symmetric = true;
  d.parameters = {{"mbar", mbar}, {"qbar", qbar}, {"r_inner", prof->r_inner()},
                  {"horizon_s", prof->horizon()}};
  return d;
}

InitialData rn_ads_data(int n, double mbar, double qbar) {
  return rn_ads_data(default_model_chart(n), mbar, qbar);
}

InitialData schwarzschild_ads_data(const Chart& chart, double mbar) {
  return rn_ads_data(chart, mbar, 0.0);
}

InitialData perturbed_data(const Chart& chart, double tau, double epsilon,
                           std::uint64_t seed,
                           const PerturbationOptions& options) {
  const int n = chart.n;
  if (options.enforce_rate && !(tau > 0.5 * n)) {
    throw ModelDomainError("perturbation: tau must exceed n/2");
  }
  if (!std::isfinite(epsilon)) {
    throw ModelDomainError("perturbation: epsilon must be finite");
  }
  const double rate = options.rate > 0.0 ? options.rate : tau;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  if (options.profile == "conformal") {
    if (!(epsilon > -1.0)) {
      throw ModelDomainError("perturbation: conformal profile needs epsilon > -1");
    }
    Vec a(n);
    for (int i = 0; i < n; ++i) {
      a(i) = unif(rng);
    }
    a.normalize();
    const double cb = std::cosh(options.beta);
    const double sb = std::sinh(options.beta);
    const double power = 4.0 / (n - 2);
    auto value = [=](const Point& y) {
      const double r = chart_radius(y);
      const double w = cb * std::cosh(r) + sb * std::sinh(r) * a.dot(y) / r;
      const double v = epsilon * std::pow(w, -n);
      // u^{4/(n-2)} - 1 without cancellation for small v.
      const double psi = std::expm1(power * std::log1p(v));
      return Tensor::from_mat(psi * background_metric(y));
    };
    InitialData d = make_initial_data(
        chart, make_field(n, 2, Variance::Covariant, value), zero_field(n, 2),
        zero_field(n, 1, Variance::Contravariant), static_cast<double>(n),
        "perturbation");
    d.time_symmetric = true;
    d.parameters = {{"tau", static_cast<double>(n)}, {"epsilon", epsilon},
                    {"beta", options.beta}, {"seed", static_cast<double>(seed)}};
    for (int i = 0; i < n; ++i) {
      d.parameters.emplace_back("direction_" + std::to_string(i + 1), a(i));
    }
    return d;
  }
  if (options.profile != "generic") {
    throw ModelDomainError("perturbation: unknown profile " + options.profile);
  }

  auto random_sym = [&]() {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        m(i, j) = m(j, i) = unif(rng);
      }
    }
    return m;
  };
  std::vector<Mat> h(static_cast<std::size_t>(n + 1));
  std::vector<Mat> k(static_cast<std::size_t>(n + 1));
  std::vector<Vec> x(static_cast<std::size_t>(n + 1));
  for (auto& m : h) {
    m = random_sym();
  }
  for (auto& m : k) {
    m = random_sym();
  }
  for (auto& v : x) {
    v = Vec(n);
    for (int i = 0; i < n; ++i) {
      v(i) = unif(rng);
    }
  }
  auto affine_mat = [n](const std::vector<Mat>& c, const Vec& u) {
    Mat m = c[0];
    for (int i = 0; i < n; ++i) {
      m += u(i) * c[static_cast<std::size_t>(i + 1)];
    }
    return m;
  };
  auto covariant = [=](const std::vector<Mat>& c) {
    return [=](const Point& y) {
      const double r = chart_radius(y);
      const Mat f = frame_map(y);
      return Tensor::from_mat(epsilon * std::exp(-rate * r) * f *
                              affine_mat(c, y / r) * f);
    };
  };
  auto e_vec = [=](const Point& y) {
    const double r = chart_radius(y);
    const Vec u = y / r;
    Vec v = x[0];
    for (int i = 0; i < n; ++i) {
      v += u(i) * x[static_cast<std::size_t>(i + 1)];
    }
    return Tensor::from_vec(epsilon * std::exp(-rate * r) *
                            (inverse_frame_map(y) * v));
  };
  InitialData d = make_initial_data(
      chart, make_field(n, 2, Variance::Covariant, covariant(h)),
      make_field(n, 2, Variance::Covariant, covariant(k)),
      make_field(n, 1, Variance::Contravariant, e_vec), tau, "perturbation");
  d.time_symmetric = false;
  d.parameters = {{"tau", tau}, {"epsilon", epsilon}, {"rate", rate},
                  {"seed", static_cast<double>(seed)}};
  return d;
}

InitialData tangential_trace_data(const Chart& chart, double epsilon,
                                  int axis) {
  const int n = chart.n;
  if (axis < 1 || axis > n) {
    throw ModelDomainError("tangential_trace_data: axis must be in 1..n");
  }
  auto k = [=](const Point& y) {
    const double r = chart_radius(y);
    const Vec xhat = y / r;
    return Tensor::from_mat(epsilon * std::exp(-(n - 1) * r) * xhat(axis - 1) *
                            (background_metric(y) - xhat * xhat.transpose()));
  };
  InitialData d = make_initial_data(chart, zero_field(n, 2), make_field(n, 2, Variance::Covariant, k),
                                    zero_field(n, 1, Variance::Contravariant),
                                    static_cast<double>(n - 1), "tangential_trace");
  d.parameters = {{"epsilon", epsilon}, {"axis", static_cast<double>(axis)}};
  return d;
}

InitialData make_model(const ModelSpec& spec, const Chart& chart) {
  if (chart.n != spec.n) {
    throw ConfigError("model: chart dimension does not match the model");
  }
  if (spec.family == "hyperbolic") {
    return hyperbolic_data(chart);
  }
  if (spec.family == "schwarzschild_ads") {
    return rn_ads_data(chart, spec.mbar, 0.0);
  }
  if (spec.family == "rn_ads") {
    return rn_ads_data(chart, spec.mbar, spec.qbar);
  }
  if (spec.family == "perturbation") {
    PerturbationOptions opt;
    opt.profile = spec.profile;
    opt.beta = spec.beta;
    opt.rate = spec.rate;
    opt.enforce_rate = spec.enforce_rate;
    const double tau = spec.tau > 0.0 ? spec.tau : static_cast<double>(spec.n);
    return perturbed_data(chart, tau, spec.epsilon, spec.seed, opt);
  }
  throw ConfigError("model: unknown family " + spec.family);
}

}  // namespace adscharge
