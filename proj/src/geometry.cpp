// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/geometry.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <string>

#include "adscharge/errors.hpp"

namespace adscharge {

namespace {

constexpr double pi = boost::math::constants::pi<double>();

// Multi-index helpers for the flat Tensor layout.
void unflatten(std::size_t flat, int dim, int rank, int* idx) {
  for (int p = rank - 1; p >= 0; --p) {
    idx[p] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
}

std::size_t flatten(const int* idx, int dim, int rank) {
  std::size_t flat = 0;
  for (int p = 0; p < rank; ++p) {
    flat = flat * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx[p]);
  }
  return flat;
}

}  // namespace

double sphere_area(int n) {
  if (n < 1) {
    throw InvalidDimensionError("sphere_area: n must be positive");
  }
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double sinh_ratio(double r) {
  if (std::abs(r) < 0.5) {
    // sum r^{2k} / (2k+1)!
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 12; ++k) {
      term *= r * r / ((2.0 * k) * (2.0 * k + 1.0));
      sum += term;
    }
    return sum;
  }
  return std::sinh(r) / r;
}

double sinh_ratio_d1(double r) {
  if (std::abs(r) < 0.5) {
    // sum 2k r^{2k-1} / (2k+1)!
    double coeff = 1.0;  // 1/(2k+1)!
    double sum = 0.0;
    double power = r;  // r^{2k-1}
    for (int k = 1; k < 12; ++k) {
      coeff /= (2.0 * k) * (2.0 * k + 1.0);
      sum += 2.0 * k * coeff * power;
      power *= r * r;
    }
    return sum;
  }
  return (r * std::cosh(r) - std::sinh(r)) / (r * r);
}

double sinh_ratio_d2(double r) {
  if (std::abs(r) < 0.5) {
    // sum 2k(2k-1) r^{2k-2} / (2k+1)!
    double coeff = 1.0;
    double sum = 0.0;
    double power = 1.0;
    for (int k = 1; k < 12; ++k) {
      coeff /= (2.0 * k) * (2.0 * k + 1.0);
      sum += 2.0 * k * (2.0 * k - 1.0) * coeff * power;
      power *= r * r;
    }
    return sum;
  }
  return (r * r * std::sinh(r) - 2.0 * r * std::cosh(r) + 2.0 * std::sinh(r)) /
         (r * r * r);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) {
      s += v;
    }
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void gauss_gegenbauer(int points, double lambda, std::vector<double>& nodes,
                      std::vector<double>& weights) {
  if (points < 1 || !(lambda > 0.0)) {
    throw DomainError("gauss_gegenbauer: need points >= 1 and lambda > 0");
  }
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence
  // p_{k+1} = t p_k - beta_k p_{k-1}.
  Mat jac = Mat::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    const double beta = k * (k + 2.0 * lambda - 1.0) /
                        (4.0 * (k + lambda) * (k + lambda - 1.0));
    jac(k, k - 1) = jac(k - 1, k) = std::sqrt(beta);
  }
  const double mu0 = std::sqrt(pi) * std::tgamma(lambda + 0.5) /
                     std::tgamma(lambda + 1.0);
  Eigen::SelfAdjointEigenSolver<Mat> eig(jac);
  nodes.resize(static_cast<std::size_t>(points));
  weights.resize(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    nodes[static_cast<std::size_t>(k)] = eig.eigenvalues()(k);
    const double v0 = eig.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
  }
  // Symmetrize: the exact rule is symmetric about 0.
  for (int k = 0; k < points / 2; ++k) {
    const auto a = static_cast<std::size_t>(k);
    const auto b = static_cast<std::size_t>(points - 1 - k);
    const double t = 0.5 * (nodes[b] - nodes[a]);
    const double w = 0.5 * (weights[a] + weights[b]);
    nodes[a] = -t;
    nodes[b] = t;
    weights[a] = weights[b] = w;
  }
  if (points % 2 == 1) {
    nodes[static_cast<std::size_t>(points / 2)] = 0.0;
  }
}

int default_sphere_degree(int n) { return 2 * n + 4; }

SphereRule make_sphere_rule(int n, int degree) {
  if (n < 2) {
    throw InvalidDimensionError("make_sphere_rule: n must be at least 2");
  }
  if (degree < 0) {
    throw DomainError("make_sphere_rule: degree must be non-negative");
  }
  SphereRule rule;
  rule.n = n;
  rule.degree = degree;
  const int gauss_points = (degree + 2) / 2;
  const int azimuth_points = degree + 1;

  // Polar factors k = 1..n-2 with weight (1-t^2)^{(n-2-k)/2}.
  std::vector<std::vector<double>> t_nodes(static_cast<std::size_t>(n - 2));
  std::vector<std::vector<double>> t_weights(static_cast<std::size_t>(n - 2));
  for (int k = 1; k <= n - 2; ++k) {
    gauss_gegenbauer(gauss_points, 0.5 * (n - 1 - k),
                     t_nodes[static_cast<std::size_t>(k - 1)],
                     t_weights[static_cast<std::size_t>(k - 1)]);
  }

  std::vector<int> counter(static_cast<std::size_t>(n - 2), 0);
  while (true) {
    for (int a = 0; a < azimuth_points; ++a) {
      const double phi = 2.0 * pi * a / azimuth_points;
      Vec x(n);
      double scale = 1.0;
      double w = 2.0 * pi / azimuth_points;
      for (int k = 0; k < n - 2; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double t = t_nodes[kk][static_cast<std::size_t>(counter[kk])];
        x(k) = scale * t;
        scale *= std::sqrt(std::max(0.0, 1.0 - t * t));
        w *= t_weights[kk][static_cast<std::size_t>(counter[kk])];
      }
      x(n - 2) = scale * std::cos(phi);
      x(n - 1) = scale * std::sin(phi);
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
    int k = n - 3;
    while (k >= 0) {
      auto& c = counter[static_cast<std::size_t>(k)];
      if (++c < gauss_points) {
        break;
      }
      c = 0;
      --k;
    }
    if (k < 0) {
      break;
    }
  }
  return rule;
}

std::vector<double> geometric_ladder(double r_min, double r_max, int count) {
  if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) {
    throw DomainError("geometric_ladder: need count >= 2 and 0 < r_min < r_max");
  }
  std::vector<double> radii(static_cast<std::size_t>(count));
  const double ratio = std::pow(r_max / r_min, 1.0 / (count - 1));
  for (int k = 0; k < count; ++k) {
    radii[static_cast<std::size_t>(k)] = r_min * std::pow(ratio, k);
  }
  radii.back() = r_max;
  return radii;
}

Chart Chart::make(int n, std::vector<double> radial_nodes, int degree) {
  Chart chart;
  chart.n = n;
  chart.radial_nodes = std::move(radial_nodes);
  chart.sphere = make_sphere_rule(n, degree);
  chart.validate();
  return chart;
}

void Chart::validate() const {
  if (n < 3) {
    throw InvalidDimensionError("chart: n must be at least 3");
  }
  if (sphere.n != n) {
    throw ShapeError("chart: angular rule dimension does not match n");
  }
  for (std::size_t k = 0; k < radial_nodes.size(); ++k) {
    if (!(radial_nodes[k] > 0.0) ||
        (k > 0 && !(radial_nodes[k] > radial_nodes[k - 1]))) {
      throw DomainError("chart: radial nodes must be positive and increasing");
    }
  }
}

double chart_radius(const Point& y) {
  const double r = y.norm();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("chart point must have r > 0");
  }
  return r;
}

PolarMetric background_metric_polar(double r) {
  if (!(r > 0.0)) {
    throw DomainError("background_metric: r must be positive");
  }
  const double s = std::sinh(r);
  return {1.0, s * s};
}

Mat background_metric(const Point& y) {
  const double r = chart_radius(y);
  const int n = static_cast<int>(y.size());
  const Vec u = y / r;
  const double s = sinh_ratio(r);
  const double big_s = s * s;
  return big_s * Mat::Identity(n, n) + (1.0 - big_s) * u * u.transpose();
}

Mat background_inverse(const Point& y) {
  const double r = chart_radius(y);
  const int n = static_cast<int>(y.size());
  const Vec u = y / r;
  const double s = sinh_ratio(r);
  const double inv = 1.0 / (s * s);
  return inv * Mat::Identity(n, n) + (1.0 - inv) * u * u.transpose();
}

Tensor background_metric_derivative(const Point& y) {
  const double r = chart_radius(y);
  const int n = static_cast<int>(y.size());
  const Vec u = y / r;
  const double s = sinh_ratio(r);
  const double ds = sinh_ratio_d1(r);
  const double big_s = s * s;
  const double dbig_s = 2.0 * s * ds;
  // (1 - S)/r, with S = 1 + r^2/3 + ... near the origin.
  const double c = (1.0 - big_s) / r;
  Tensor db(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double pij = (i == j ? 1.0 : 0.0) - u(i) * u(j);
      for (int k = 0; k < n; ++k) {
        const double pik = (i == k ? 1.0 : 0.0) - u(i) * u(k);
        const double pjk = (j == k ? 1.0 : 0.0) - u(j) * u(k);
        db(i, j, k) = dbig_s * u(k) * pij + c * (pik * u(j) + u(i) * pjk);
      }
    }
  }
  return db;
}

Tensor background_christoffel(const Point& y) {
  const int n = static_cast<int>(y.size());
  const Mat binv = background_inverse(y);
  const Tensor db = background_metric_derivative(y);
  Tensor lower(n, 3);  // Gamma_{l ij}
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        lower(l, i, j) = 0.5 * (db(l, j, i) + db(l, i, j) - db(i, j, l));
      }
    }
  }
  Tensor gamma(n, 3);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += binv(k, l) * lower(l, i, j);
        }
        gamma(k, i, j) = s;
      }
    }
  }
  return gamma;
}

Tensor background_christoffel_derivative(const Point& y, double h) {
  return fd_derivative([](const Point& p) { return background_christoffel(p); },
                       y, h);
}

FieldPtr background_metric_field(int n) {
  return make_field(
      n, 2, Variance::Covariant,
      [](const Point& y) { return Tensor::from_mat(background_metric(y)); },
      [](const Point& y) { return background_metric_derivative(y); });
}

Mat frame_map(const Point& y) {
  const double r = chart_radius(y);
  const int n = static_cast<int>(y.size());
  const Vec u = y / r;
  const double s = sinh_ratio(r);
  return s * Mat::Identity(n, n) + (1.0 - s) * u * u.transpose();
}

Mat inverse_frame_map(const Point& y) {
  const double r = chart_radius(y);
  const int n = static_cast<int>(y.size());
  const Vec u = y / r;
  const double s = 1.0 / sinh_ratio(r);
  return s * Mat::Identity(n, n) + (1.0 - s) * u * u.transpose();
}

Tensor to_orthonormal(const Tensor& t, Variance variance, const Point& y) {
  if (t.rank() == 0) {
    return t;
  }
  const int n = static_cast<int>(y.size());
  if (t.dim() != n) {
    throw ShapeError("to_orthonormal: tensor dimension does not match point");
  }
  const Mat f = frame_map(y);
  const Mat finv = inverse_frame_map(y);
  Tensor cur = t;
  const int rank = t.rank();
  int idx[4];
  int src[4];
  for (int p = 0; p < rank; ++p) {
    const Mat& m = (p == 0 && variance == Variance::Contravariant) ? f : finv;
    Tensor next(n, rank);
    for (std::size_t flat = 0; flat < next.size(); ++flat) {
      unflatten(flat, n, rank, idx);
      std::copy(idx, idx + rank, src);
      double s = 0.0;
      for (int a = 0; a < n; ++a) {
        src[p] = a;
        s += m(idx[p], a) * cur[flatten(src, n, rank)];
      }
      next[flat] = s;
    }
    cur = std::move(next);
  }
  return cur;
}

double norm_b(const Tensor& t, Variance variance, const Point& y) {
  const Tensor o = to_orthonormal(t, variance, y);
  double s = 0.0;
  for (double x : o.data()) {
    s += x * x;
  }
  return std::sqrt(s);
}

Tensor covariant_derivative_b(const Tensor& value, const Tensor& partial,
                              Variance variance, const Point& y) {
  const int n = static_cast<int>(y.size());
  const int rank = value.rank();
  if (partial.rank() != rank + 1 || partial.dim() != n) {
    throw ShapeError("covariant_derivative_b: partial derivative has wrong shape");
  }
  if (rank == 0) {
    return partial;
  }
  const Tensor gamma = background_christoffel(y);
  Tensor out = partial;
  int idx[5];
  int src[4];
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    unflatten(flat, n, rank + 1, idx);
    const int m = idx[rank];
    double corr = 0.0;
    for (int p = 0; p < rank; ++p) {
      std::copy(idx, idx + rank, src);
      const bool upper = p == 0 && variance == Variance::Contravariant;
      for (int l = 0; l < n; ++l) {
        src[p] = l;
        const double tv = value[flatten(src, n, rank)];
        corr += upper ? gamma(idx[p], m, l) * tv : -gamma(l, m, idx[p]) * tv;
      }
    }
    out[flat] += corr;
  }
  return out;
}

Tensor covariant_derivative_b(const Field& field, const Point& y) {
  if (field.dim() != y.size()) {
    throw ShapeError("covariant_derivative_b: point dimension mismatch");
  }
  Tensor value = field.value(y);
  if (value.rank() == 0) {
    return field.derivative(y);
  }
  return covariant_derivative_b(value, field.derivative(y), field.variance(), y);
}

namespace {

Tensor christoffel_of(const Field& metric, const Point& y) {
  const int n = static_cast<int>(y.size());
  const Mat g = metric.value(y).as_mat();
  const Mat ginv = g.inverse();
  const Tensor dg = metric.derivative(y);
  Tensor gamma(n, 3);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += ginv(k, l) * (dg(l, j, i) + dg(l, i, j) - dg(i, j, l));
        }
        gamma(k, i, j) = 0.5 * s;
      }
    }
  }
  return gamma;
}

}  // namespace

double scalar_curvature(const Field& metric, const Point& y) {
  const int n = static_cast<int>(y.size());
  const Mat ginv = metric.value(y).as_mat().inverse();
  const Tensor gamma = christoffel_of(metric, y);
  const Tensor dgamma = fd_derivative(
      [&metric](const Point& p) { return christoffel_of(metric, p); }, y,
      metric.fd_step());
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double ric = 0.0;
      for (int k = 0; k < n; ++k) {
        ric += dgamma(k, i, j, k) - dgamma(k, i, k, j);
        for (int l = 0; l < n; ++l) {
          ric += gamma(k, k, l) * gamma(l, i, j) - gamma(k, j, l) * gamma(l, i, k);
        }
      }
      r += ginv(i, j) * ric;
    }
  }
  return r;
}

double sphere_integrate(const SphereRule& rule, double r,
                        const std::function<double(const Vec&)>& f) {
  if (!(r > 0.0)) {
    throw DomainError("sphere_integrate: r must be positive");
  }
  std::vector<double> terms(rule.size());
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double v = f(rule.nodes[k]);
    if (!std::isfinite(v)) {
      throw PropagationError(
          "sphere_integrate: non-finite sample at angular node " +
              std::to_string(k),
          k);
    }
    terms[k] = rule.weights[k] * v;
  }
  return pairwise_sum(terms) * std::pow(std::sinh(r), rule.n - 1);
}

}  // namespace adscharge
