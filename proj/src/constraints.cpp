// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

ConstraintValues constraint_map(const InitialData& data, const Point& y) {
  const int n = data.n;
  if (y.size() != n) {
    throw ShapeError("constraint_map: point dimension mismatch");
  }
  const Mat b = background_metric(y);
  const Tensor et = data.e->value(y);
  const Mat e = et.as_mat();
  const Mat g = b + e;
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success || !g.allFinite()) {
    throw DegenerateMetricError("constraint_map: g is not positive definite");
  }
  const Mat gi = llt.solve(Mat::Identity(n, n));

  const Tensor gam = background_christoffel(y);
  const Tensor dgam = background_christoffel_derivative(y, data.e->fd_step());
  const Tensor de = data.e->derivative(y);
  const Tensor dde = data.e->second_derivative(y);

  // D(i,j,m) = nabla_m e_ij and DD(i,j,m,p) = nabla_p nabla_m e_ij.
  const Tensor D = covariant_derivative_b(et, de, Variance::Covariant, y);
  Tensor dD(n, 4);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n; ++m) {
        for (int p = 0; p < n; ++p) {
          double s = dde(i, j, m, p);
          for (int l = 0; l < n; ++l) {
            s -= dgam(l, m, i, p) * e(l, j) + gam(l, m, i) * de(l, j, p) +
                 dgam(l, m, j, p) * e(i, l) + gam(l, m, j) * de(i, l, p);
          }
          dD(i, j, m, p) = s;
        }
      }
    }
  }
  const Tensor DD = covariant_derivative_b(D, dD, Variance::Covariant, y);

  // Difference tensor C = nabla^g - nabla^b and its b-derivative.
  Tensor T(n, 3);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        T(l, i, j) = D(l, j, i) + D(l, i, j) - D(i, j, l);
      }
    }
  }
  Tensor C(n, 3);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += gi(k, l) * T(l, i, j);
        }
        C(k, i, j) = 0.5 * s;
      }
    }
  }
  Tensor dginv(n, 3);  // nabla_m g^{kl} as (k, l, m)
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      for (int m = 0; m < n; ++m) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) {
          for (int c = 0; c < n; ++c) {
            s += gi(k, a) * D(a, c, m) * gi(c, l);
          }
        }
        dginv(k, l, m) = -s;
      }
    }
  }
  auto nabla_t = [&](int l, int i, int j, int m) {
    return DD(l, j, i, m) + DD(l, i, j, m) - DD(i, j, l, m);
  };
  auto dC = [&](int k, int i, int j, int m) {
    double s = 0.0;
    for (int l = 0; l < n; ++l) {
      s += dginv(k, l, m) * T(l, i, j) + gi(k, l) * nabla_t(l, i, j, m);
    }
    return 0.5 * s;
  };

  // R_g + n(n-1) = (n-1) tr(g^{-1} e) + g^{ij} (Ric_g - Ric_b)_ij.
  double ric_term = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (gi(i, j) == 0.0) {
        continue;
      }
      double d = 0.0;
      for (int k = 0; k < n; ++k) {
        d += dC(k, i, j, k) - dC(k, i, k, j);
        for (int l = 0; l < n; ++l) {
          d += C(k, k, l) * C(l, i, j) - C(k, j, l) * C(l, i, k);
        }
      }
      ric_term += gi(i, j) * d;
    }
  }
  const double scalar_deficit = (n - 1) * (gi.cwiseProduct(e)).sum() + ric_term;

  // Momentum constraint.
  const Tensor kt = data.K->value(y);
  const Mat k = kt.as_mat();
  const Tensor DK = covariant_derivative_b(kt, data.K->derivative(y),
                                           Variance::Covariant, y);
  const double tr_k = (gi.cwiseProduct(k)).sum();
  const Mat gk = gi * k;
  const double k2 = (gk * gk).trace();
  Vec phi2(n);
  for (int j = 0; j < n; ++j) {
    double div = 0.0;
    double dtr = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int kk = 0; kk < n; ++kk) {
        double cov = DK(kk, j, i);
        for (int l = 0; l < n; ++l) {
          cov -= C(l, i, kk) * k(l, j) + C(l, i, j) * k(kk, l);
        }
        div += gi(i, kk) * cov;
        dtr += gi(i, kk) * DK(i, kk, j) + dginv(i, kk, j) * k(i, kk);
      }
    }
    phi2(j) = 2.0 * (div - dtr);
  }

  // Gauss law.
  const Tensor et_e = data.E->value(y);
  const Vec ev = et_e.as_vec();
  const Mat DE = covariant_derivative_b(et_e, data.E->derivative(y),
                                        Variance::Contravariant, y)
                     .as_mat();
  double div_e = DE.trace();
  for (int i = 0; i < n; ++i) {
    for (int kk = 0; kk < n; ++kk) {
      div_e += C(i, i, kk) * ev(kk);
    }
  }
  const double e2 = ev.dot(g * ev);

  ConstraintValues out;
  out.phi1_shifted =
      scalar_deficit + tr_k * tr_k - k2 - (n - 1.0) * (n - 2.0) * e2;
  out.phi1 = out.phi1_shifted - n * (n - 1.0);
  out.phi2 = phi2;
  out.phi3 = 2.0 * (n - 1) * div_e;
  return out;
}

Densities densities(const InitialData& data, const Point& y) {
  const ConstraintValues c = constraint_map(data, y);
  Densities d;
  d.mu = 0.5 * c.phi1;
  d.mu_shifted = 0.5 * c.phi1_shifted;
  d.J = 0.5 * c.phi2;
  d.varpi = 0.5 * c.phi3;
  const Mat gi = data.g(y).inverse();
  d.j_norm = std::sqrt(std::max(0.0, d.J.dot(gi * d.J)));
  return d;
}

double dec_margin(const Densities& d) {
  return d.mu_shifted - std::sqrt(d.j_norm * d.j_norm + d.varpi * d.varpi);
}

DecReport dec_check(const InitialData& data, const DecOptions& options) {
  std::vector<Point> samples = options.samples;
  if (samples.empty()) {
    for (double r : data.chart.radial_nodes) {
      for (const Vec& xhat : data.chart.sphere.nodes) {
        samples.push_back(r * xhat);
      }
    }
  }
  const int n = data.n;
  DecReport rep;
  rep.tolerance = options.tolerance;
  rep.relative_tolerance = options.relative_tolerance;
  rep.samples = samples.size();
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.max_margin = -std::numeric_limits<double>::infinity();
  rep.worst_excess = std::numeric_limits<double>::infinity();
  for (const Point& y : samples) {
    const Densities d = densities(data, y);
    const double m = dec_margin(d);
    const double scale =
        n * (n - 1) *
            (norm_b(data.e->value(y), Variance::Covariant, y) +
             norm_b(data.K->value(y), Variance::Covariant, y) +
             norm_b(data.E->value(y), Variance::Contravariant, y)) +
        std::abs(d.mu_shifted) + d.j_norm + std::abs(d.varpi);
    const double excess =
        m + options.tolerance + options.relative_tolerance * scale;
    rep.min_margin = std::min(rep.min_margin, m);
    rep.max_margin = std::max(rep.max_margin, m);
    if (excess < rep.worst_excess) {
      rep.worst_excess = excess;
      rep.worst_point = y;
      rep.worst_scale = scale;
    }
  }
  if (samples.empty()) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  rep.verdict = rep.worst_excess >= 0.0 ? Verdict::Pass : Verdict::Fail;
  return rep;
}

double constraint_pairing(const InitialData& data, const Kid& kid,
                          const Point& y) {
  const ConstraintValues c = constraint_map(data, y);
  double s = 0.0;
  if (kid.V) {
    s += kid.V->value(y).as_scalar() * c.phi1_shifted;
  }
  if (kid.alpha) {
    s += kid.alpha->value(y).as_vec().dot(background_inverse(y) * c.phi2);
  }
  s += kid.f * c.phi3;
  return s;
}

IntegrabilityReport integrability_check(const InitialData& data,
                                        const Kid& kid,
                                        const IntegrabilityOptions& options) {
  IntegrabilityReport rep;
  const auto& radii = data.chart.radial_nodes;
  if (radii.size() < options.min_radii) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "too few radii";
    return rep;
  }
  const SphereRule& rule = data.chart.sphere;
  std::vector<double> densities_per_width;
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const double mid = 0.5 * (radii[k] + radii[k + 1]);
    const double width = radii[k + 1] - radii[k];
    const double shell = sphere_integrate(rule, mid, [&](const Vec& xhat) {
      return std::abs(constraint_pairing(data, kid, mid * xhat));
    });
    const double scale = sphere_integrate(rule, mid, [&](const Vec& xhat) {
      const Point y = mid * xhat;
      const double v = kid.V ? std::abs(kid.V->value(y).as_scalar()) : 1.0;
      return std::max(v, 1.0) *
             norm_b(data.e->value(y), Variance::Covariant, y);
    });
    rep.shell_midpoints.push_back(mid);
    rep.shell_integrals.push_back(width * shell);
    densities_per_width.push_back(shell);
    rep.scale = std::max(rep.scale, scale);
  }
  const double peak =
      *std::max_element(densities_per_width.begin(), densities_per_width.end());
  if (peak == 0.0 || peak <= options.negligible_ratio * rep.scale) {
    rep.verdict = Verdict::Pass;
    rep.reason = "shell integrals negligible";
    return rep;
  }
  // Least-squares slope of log(density) against r.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (std::size_t k = 0; k < densities_per_width.size(); ++k) {
    if (densities_per_width[k] <= 0.0) {
      continue;
    }
    const double x = rep.shell_midpoints[k];
    const double yv = std::log(densities_per_width[k]);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++count;
  }
  if (count < 3) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "too few non-zero shells for a rate fit";
    return rep;
  }
  rep.log_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  if (rep.log_slope < -0.05) {
    rep.verdict = Verdict::Pass;
    rep.reason = "shell densities decay geometrically";
  } else {
    rep.verdict = Verdict::Fail;
    rep.reason = "shell densities do not decay: tail not summable";
  }
  return rep;
}

}  // namespace adscharge
