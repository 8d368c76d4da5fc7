// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/kids.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "adscharge/errors.hpp"
#include "adscharge/geometry.hpp"

namespace adscharge {

namespace {

const Complex I(0.0, 1.0);

// q = s'(r)/r and q'(r)/r for s = sinh(r)/r; both even and smooth at 0.
double q_ratio(double r) {
  if (r < 0.5) {
    double coeff = 1.0;
    double sum = 0.0;
    double power = 1.0;
    for (int k = 1; k < 12; ++k) {
      coeff /= (2.0 * k) * (2.0 * k + 1.0);
      sum += 2.0 * k * coeff * power;
      power *= r * r;
    }
    return sum;
  }
  return sinh_ratio_d1(r) / r;
}

double dq_ratio(double r) {
  if (r < 0.5) {
    double coeff = 1.0 / 6.0;
    double sum = 0.0;
    double power = 1.0;
    for (int k = 2; k < 13; ++k) {
      coeff /= (2.0 * k) * (2.0 * k + 1.0);
      sum += 2.0 * k * (2.0 * k - 2.0) * coeff * power;
      power *= r * r;
    }
    return sum;
  }
  return (sinh_ratio_d2(r) - q_ratio(r)) / (r * r);
}

double tanh_half_ratio(double r) {
  if (r < 1e-4) {
    return 0.5 - r * r / 24.0;
  }
  return std::tanh(0.5 * r) / r;
}

void check_mu(int mu, int n) {
  if (mu < 0 || mu > n) {
    throw ShapeError("static potential index out of range");
  }
}

// Pointwise evaluation of the spinor KID in geodesic normal coordinates.
struct SpinorKidEval {
  CliffordRep rep;
  Spinor u;
  int sign;

  struct Values {
    double v;
    Vec grad_v;
    Vec alpha;
    double f;
  };

  Values operator()(const Point& y) const {
    const int n = rep.n;
    const double r = y.norm();
    const Point x = ball_point(y);
    const double omega = ball_conformal_factor(r);
    const CMat c = rep.clifford_matrix(x);
    const Spinor w = u - static_cast<double>(sign) * I * (c * u);
    const double rs = 1.0 / std::sqrt(omega);
    const Spinor zeta = rs * w;
    Values out;
    out.v = zeta.squaredNorm();
    Vec grad_x(n);
    Vec alpha_x(n);
    const Spinor gz = rep.chirality * zeta;
    const double scale = std::max(1.0, out.v);
    for (int k = 0; k < n; ++k) {
      const CMat& gk = rep.gammas[static_cast<std::size_t>(k)];
      const Spinor dz = 0.5 * rs / omega * x(k) * w -
                        static_cast<double>(sign) * I * rs * (gk * u);
      grad_x(k) = 2.0 * zeta.dot(dz).real();
      const Complex a = zeta.dot(gk * gz);
      if (std::abs(a.imag()) > 1e-12 * scale) {
        throw ConsistencyError("kid_from_spinor: alpha pairing is not real");
      }
      // alpha(d/dx^k) = alpha(e_k)/omega with e_k = omega d/dx^k.
      alpha_x(k) = a.real() / omega;
    }
    const Complex fc = zeta.dot(gz);
    if (std::abs(fc.imag()) > 1e-12 * scale) {
      throw ConsistencyError("kid_from_spinor: f pairing is not real");
    }
    out.f = fc.real();
    const Mat jac = ball_jacobian(y);
    out.grad_v = jac.transpose() * grad_x;
    out.alpha = jac.transpose() * alpha_x;
    return out;
  }
};

}  // namespace

std::string to_string(KidProvenance p) {
  switch (p) {
    case KidProvenance::Basis:
      return "basis";
    case KidProvenance::Spinor:
      return "spinor";
    default:
      return "custom";
  }
}

Kid combine(double a, const Kid& k1, double b, const Kid& k2) {
  auto mix = [&](const FieldPtr& f1, const FieldPtr& f2) -> FieldPtr {
    std::vector<std::pair<double, FieldPtr>> terms;
    if (f1 && a != 0.0) {
      terms.emplace_back(a, f1);
    }
    if (f2 && b != 0.0) {
      terms.emplace_back(b, f2);
    }
    if (terms.empty()) {
      return nullptr;
    }
    return linear_combination(terms);
  };
  Kid out;
  out.V = mix(k1.V, k2.V);
  out.alpha = mix(k1.alpha, k2.alpha);
  out.f = a * k1.f + b * k2.f;
  out.f_field = mix(k1.f_field, k2.f_field);
  out.provenance = KidProvenance::Custom;
  out.label = "combination";
  return out;
}

double static_potential(int mu, const Point& point, PotentialModel model) {
  const int n = static_cast<int>(point.size());
  check_mu(mu, n);
  if (model == PotentialModel::Ball) {
    const double x2 = point.squaredNorm();
    if (!(x2 < 1.0)) {
      throw DomainError("static_potential: ball point must satisfy |x| < 1");
    }
    if (mu == 0) {
      return (1.0 + x2) / (1.0 - x2);
    }
    return 2.0 * point(mu - 1) / (1.0 - x2);
  }
  const double r = point.norm();
  if (mu == 0) {
    return std::cosh(r);
  }
  return point(mu - 1) * sinh_ratio(r);
}

Vec static_potential_gradient(int mu, const Point& y) {
  const int n = static_cast<int>(y.size());
  check_mu(mu, n);
  const double r = y.norm();
  if (mu == 0) {
    return sinh_ratio(r) * y;
  }
  Vec g = q_ratio(r) * y(mu - 1) * y;
  g(mu - 1) += sinh_ratio(r);
  return g;
}

Mat static_potential_hessian(int mu, const Point& y) {
  const int n = static_cast<int>(y.size());
  check_mu(mu, n);
  const double r = y.norm();
  const double q = q_ratio(r);
  if (mu == 0) {
    return sinh_ratio(r) * Mat::Identity(n, n) + q * y * y.transpose();
  }
  const int j = mu - 1;
  Mat h = (y(j) * dq_ratio(r)) * y * y.transpose();
  h += (q * y(j)) * Mat::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    h(j, k) += q * y(k);
    h(k, j) += q * y(k);
  }
  return h;
}

Point ball_point(const Point& y) { return tanh_half_ratio(y.norm()) * y; }

Mat ball_jacobian(const Point& y) {
  const int n = static_cast<int>(y.size());
  const double r = y.norm();
  const double tr = tanh_half_ratio(r);
  Mat j = tr * Mat::Identity(n, n);
  if (r > 0.0) {
    const double c = std::cosh(0.5 * r);
    const double dt = 0.5 / (c * c);
    const Vec u = y / r;
    j += (dt - tr) * u * u.transpose();
  }
  return j;
}

double ball_conformal_factor(double r) {
  const double c = std::cosh(0.5 * r);
  return 0.5 / (c * c);
}

FieldPtr static_potential_field(int n, int mu) {
  check_mu(mu, n);
  return make_field(
      n, 0, Variance::Covariant,
      [mu](const Point& y) {
        return Tensor::scalar(static_potential(mu, y, PotentialModel::Polar));
      },
      [mu](const Point& y) {
        return Tensor::from_vec(static_potential_gradient(mu, y));
      },
      [mu](const Point& y) {
        return Tensor::from_mat(static_potential_hessian(mu, y));
      });
}

Kid potential_kid(int n, int mu) {
  Kid k;
  k.V = static_potential_field(n, mu);
  k.provenance = KidProvenance::Basis;
  k.label = "V_(" + std::to_string(mu) + ")";
  return k;
}

Kid constant_kid(int n) {
  (void)n;
  Kid k;
  k.f = 1.0;
  k.provenance = KidProvenance::Basis;
  k.label = "f=1";
  return k;
}

std::vector<Kid> killing_field_basis(int n) {
  if (n < 2) {
    throw InvalidDimensionError("killing_field_basis: n must be at least 2");
  }
  std::vector<Kid> basis;
  for (int mu = 0; mu <= n; ++mu) {
    for (int nu = mu + 1; nu <= n; ++nu) {
      // Closed forms: expanding V_mu dV_nu - V_nu dV_mu cancels terms of size
      // e^{2r} in the radial component, which costs every digit far out.
      auto value = [mu, nu](const Point& y) {
        const int n = static_cast<int>(y.size());
        const double r = chart_radius(y);
        const double s = sinh_ratio(r);
        Vec a = Vec::Zero(n);
        if (mu == 0) {
          const Vec xhat = y / r;
          const double c = s * std::cosh(r);
          a(nu - 1) = c;
          a += (1.0 - c) * xhat(nu - 1) * xhat;
        } else {
          a(nu - 1) = s * s * y(mu - 1);
          a(mu - 1) = -s * s * y(nu - 1);
        }
        return Tensor::from_vec(a);
      };
      auto deriv = [mu, nu](const Point& y) {
        const double vm = static_potential(mu, y, PotentialModel::Polar);
        const double vn = static_potential(nu, y, PotentialModel::Polar);
        const Vec gm = static_potential_gradient(mu, y);
        const Vec gn = static_potential_gradient(nu, y);
        // (i, k) = d_k alpha_i
        const Mat d = gn * gm.transpose() - gm * gn.transpose() +
                      vm * static_potential_hessian(nu, y) -
                      vn * static_potential_hessian(mu, y);
        return Tensor::from_mat(d);
      };
      Kid k;
      k.alpha = make_field(n, 1, Variance::Covariant, value, deriv);
      k.provenance = KidProvenance::Basis;
      k.label = (mu == 0 ? "boost_" : "rotation_") + std::to_string(mu) +
                std::to_string(nu);
      basis.push_back(std::move(k));
    }
  }
  return basis;
}

Spinor killing_spinor(const CliffordRep& rep, const Spinor& u, const Point& x,
                      int sign) {
  if (u.size() != rep.dim_spinor || x.size() != rep.n) {
    throw ShapeError("killing_spinor: shape mismatch");
  }
  const double x2 = x.squaredNorm();
  if (!(x2 < 1.0)) {
    throw DomainError("killing_spinor: ball point must satisfy |x| < 1");
  }
  const double omega = 0.5 * (1.0 - x2);
  return (u - static_cast<double>(sign) * I * (rep.clifford_matrix(x) * u)) /
         std::sqrt(omega);
}

Kid kid_from_spinor(const CliffordRep& rep, const Spinor& u, int sign) {
  if (u.size() != rep.dim_spinor) {
    throw ShapeError("kid_from_spinor: spinor length does not match the module");
  }
  if (sign != 1 && sign != -1) {
    throw DomainError("kid_from_spinor: sign must be +1 or -1");
  }
  const int n = rep.n;
  auto ev = std::make_shared<const SpinorKidEval>(SpinorKidEval{rep, u, sign});
  Kid k;
  k.V = make_field(
      n, 0, Variance::Covariant,
      [ev](const Point& y) { return Tensor::scalar((*ev)(y).v); },
      [ev](const Point& y) { return Tensor::from_vec((*ev)(y).grad_v); });
  k.alpha = make_field(n, 1, Variance::Covariant, [ev](const Point& y) {
    return Tensor::from_vec((*ev)(y).alpha);
  });
  k.f_field = make_field(n, 0, Variance::Covariant, [ev](const Point& y) {
    return Tensor::scalar((*ev)(y).f);
  });
  const Complex f0 = u.dot(rep.chirality * u);
  k.f = 2.0 * f0.real();
  // f_u must agree with the pointwise pairing; check at a fixed point.
  Point probe = Point::Constant(n, 0.37);
  const double fp = (*ev)(probe).f;
  if (std::abs(fp - k.f) > 1e-10 * std::max(1.0, u.squaredNorm())) {
    throw ConsistencyError("kid_from_spinor: f_u is not constant");
  }
  k.provenance = KidProvenance::Spinor;
  k.label = "spinor";
  k.u = u;
  return k;
}

double KidResidual::max() const { return std::max({hessian, killing, df}); }

std::vector<Point> kid_sample_points(int n, int count, std::uint64_t seed,
                                     double r_min, double r_max) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec d(n);
    for (int i = 0; i < n; ++i) {
      d(i) = normal(rng);
    }
    d.normalize();
    pts.push_back(radius(rng) * d);
  }
  return pts;
}

KidResidual adjoint_kernel_residual(const Kid& kid,
                                    const std::vector<Point>& samples) {
  KidResidual res;
  for (const Point& y : samples) {
    const int n = static_cast<int>(y.size());
    const Mat b = background_metric(y);
    const Mat binv = background_inverse(y);
    if (kid.V) {
      const double v = kid.V->value(y).as_scalar();
      const Tensor dv = kid.V->derivative(y);
      const Tensor ddv = kid.V->second_derivative(y);
      const Tensor hess = covariant_derivative_b(dv, ddv, Variance::Covariant, y);
      const Mat h = hess.as_mat();
      const double lap = (binv.cwiseProduct(h)).sum();
      const Mat t = h - lap * b + (n - 1) * v * b;
      res.hessian = std::max(
          res.hessian, norm_b(Tensor::from_mat(t), Variance::Covariant, y));
    }
    if (kid.alpha) {
      const Mat da = covariant_derivative_b(*kid.alpha, y).as_mat();
      const double div = (binv.cwiseProduct(da)).sum();
      const Mat t = -(da + da.transpose()) + 2.0 * div * b;
      res.killing = std::max(
          res.killing, norm_b(Tensor::from_mat(t), Variance::Covariant, y));
    }
    if (kid.f_field) {
      const Tensor df = kid.f_field->derivative(y);
      res.df = std::max(res.df,
                        2.0 * (n - 1) * norm_b(df, Variance::Covariant, y));
    }
  }
  return res;
}

double spinor_field_residual(const CliffordRep& rep,
                             const std::function<Spinor(const Point&)>& zeta,
                             const Point& x, int sign, double h) {
  const int n = rep.n;
  const double x2 = x.squaredNorm();
  if (!(x2 < 1.0)) {
    throw DomainError("killing_spinor_residual: ball point must satisfy |x| < 1");
  }
  const double omega = 0.5 * (1.0 - x2);
  const Spinor z = zeta(x);
  const CMat c = rep.clifford_matrix(x);
  const Spinor cz = c * z;
  double worst = 0.0;
  Point xp = x;
  for (int k = 0; k < n; ++k) {
    auto central = [&](double step) {
      xp(k) = x(k) + step;
      const Spinor p = zeta(xp);
      xp(k) = x(k) - step;
      const Spinor m = zeta(xp);
      xp(k) = x(k);
      return Spinor((p - m) / (2.0 * step));
    };
    const Spinor d = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    const CMat& gk = rep.gammas[static_cast<std::size_t>(k)];
    const Spinor nabla =
        d - 0.5 / omega * (gk * cz) - 0.5 / omega * x(k) * z;
    const Spinor res =
        omega * nabla + static_cast<double>(sign) * 0.5 * I * (gk * z);
    worst = std::max(worst, res.norm());
  }
  return worst;
}

double killing_spinor_residual(const CliffordRep& rep, const Spinor& u,
                               const Point& x, int sign, double h) {
  return spinor_field_residual(
      rep, [&](const Point& p) { return killing_spinor(rep, u, p, sign); }, x,
      sign, h);
}

std::string to_string(CausalClass c) {
  switch (c) {
    case CausalClass::TimelikeFuture:
      return "timelike-future";
    case CausalClass::TimelikePast:
      return "timelike-past";
    case CausalClass::Null:
      return "null";
    default:
      return "spacelike";
  }
}

double eta_inner(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 1) {
    throw ShapeError("eta_inner: coefficient vectors must have equal length");
  }
  return x(0) * y(0) - x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

CausalClass causal_class(const Vec& x, double tol) {
  const double q = eta_inner(x, x);
  const double scale = std::max(1.0, x.squaredNorm());
  if (std::abs(q) <= tol * scale) {
    return CausalClass::Null;
  }
  if (q < 0.0) {
    return CausalClass::Spacelike;
  }
  return x(0) > 0.0 ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
}

bool is_causal_future(const Vec& x, double tol) {
  const double spatial = x.tail(x.size() - 1).norm();
  return x(0) >= spatial - tol * std::max(1.0, x.norm());
}

}  // namespace adscharge
