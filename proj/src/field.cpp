// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/field.hpp"

#include "adscharge/errors.hpp"

namespace adscharge {

Tensor fd_derivative(const TensorFn& f, const Point& y, double h) {
  const int n = static_cast<int>(y.size());
  Tensor out;
  bool initialized = false;
  Point yp = y;
  for (int k = 0; k < n; ++k) {
    auto central = [&](double step) {
      yp(k) = y(k) + step;
      Tensor fp = f(yp);
      yp(k) = y(k) - step;
      Tensor fm = f(yp);
      yp(k) = y(k);
      fp -= fm;
      fp *= 1.0 / (2.0 * step);
      return fp;
    };
    const Tensor coarse = central(h);
    const Tensor fine = central(0.5 * h);
    if (!initialized) {
      out = Tensor(n, fine.rank() + 1);
      initialized = true;
    }
    const std::size_t m = fine.size();
    for (std::size_t a = 0; a < m; ++a) {
      out[a * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)] =
          (4.0 * fine[a] - coarse[a]) / 3.0;
    }
  }
  return out;
}

Field::Field(int dim, int rank, Variance variance, double fd_step)
    : dim_(dim), rank_(rank), variance_(variance), fd_step_(fd_step) {
  if (dim < 1) {
    throw InvalidDimensionError("field: dimension must be positive");
  }
  if (rank < 0 || rank > 3) {
    throw ShapeError("field: rank must be between 0 and 3");
  }
  if (variance == Variance::Contravariant && rank == 0) {
    throw ShapeError("field: a scalar has no contravariant index");
  }
  if (!(fd_step > 0.0)) {
    throw DomainError("field: finite-difference step must be positive");
  }
}

Tensor Field::derivative(const Point& y) const {
  return fd_derivative([this](const Point& p) { return value(p); }, y,
                       fd_step_);
}

namespace {

class DerivativeField : public Field {
 public:
  explicit DerivativeField(FieldPtr parent)
      : Field(parent->dim(), parent->rank() + 1, parent->variance(),
              parent->fd_step()),
        parent_(std::move(parent)) {}

  Tensor value(const Point& y) const override { return parent_->derivative(y); }

 private:
  FieldPtr parent_;
};

class LinearCombinationField : public Field {
 public:
  LinearCombinationField(int dim, int rank, Variance variance,
                         std::vector<std::pair<double, FieldPtr>> terms)
      : Field(dim, rank, variance), terms_(std::move(terms)) {}

  Tensor value(const Point& y) const override {
    Tensor out = zero_like(y);
    for (const auto& [c, f] : terms_) {
      out += c * f->value(y);
    }
    return out;
  }
  Tensor derivative(const Point& y) const override {
    Tensor out(dim(), rank() + 1);
    for (const auto& [c, f] : terms_) {
      out += c * f->derivative(y);
    }
    return out;
  }
  bool has_analytic_derivative() const override {
    for (const auto& term : terms_) {
      if (!term.second->has_analytic_derivative()) {
        return false;
      }
    }
    return true;
  }
  FieldPtr derivative_field() const override {
    std::vector<std::pair<double, FieldPtr>> d;
    d.reserve(terms_.size());
    for (const auto& [c, f] : terms_) {
      d.emplace_back(c, f->derivative_field());
    }
    return std::make_shared<LinearCombinationField>(dim(), rank() + 1,
                                                    variance(), std::move(d));
  }

 private:
  Tensor zero_like(const Point&) const {
    return rank() == 0 ? Tensor::scalar(0.0) : Tensor(dim(), rank());
  }
  std::vector<std::pair<double, FieldPtr>> terms_;
};

class PullbackField : public Field {
 public:
  PullbackField(FieldPtr field, std::function<Point(const Point&)> phi,
                std::function<Mat(const Point&)> jacobian)
      : Field(field->dim(), field->rank(), field->variance(),
              field->fd_step()),
        field_(std::move(field)),
        phi_(std::move(phi)),
        jacobian_(std::move(jacobian)) {}

  Tensor value(const Point& y) const override {
    const Tensor t = field_->value(phi_(y));
    if (rank() == 0) {
      return t;
    }
    const Mat j = jacobian_(y);
    const int n = dim();
    if (rank() == 1) {
      const Vec v = t.as_vec();
      return Tensor::from_vec(variance() == Variance::Covariant
                                  ? Vec(j.transpose() * v)
                                  : Vec(j.partialPivLu().solve(v)));
    }
    if (rank() == 2) {
      const Mat m = t.as_mat();
      if (variance() == Variance::Covariant) {
        return Tensor::from_mat(j.transpose() * m * j);
      }
      return Tensor::from_mat(j.partialPivLu().solve(m) * j);
    }
    // Rank 3: transform index by index.
    const Mat first = variance() == Variance::Covariant
                          ? Mat(j.transpose())
                          : Mat(j.partialPivLu().inverse());
    Tensor out(n, 3);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            for (int k = 0; k < n; ++k) {
              for (int l = 0; l < n; ++l) {
                s += first(a, i) * j(k, b) * j(l, c) * t(i, k, l);
              }
            }
          }
          out(a, b, c) = s;
        }
      }
    }
    return out;
  }

 private:
  FieldPtr field_;
  std::function<Point(const Point&)> phi_;
  std::function<Mat(const Point&)> jacobian_;
};

}  // namespace

FieldPtr Field::derivative_field() const {
  return std::make_shared<DerivativeField>(shared_from_this());
}

FunctionField::FunctionField(int dim, int rank, Variance variance,
                             TensorFn value, TensorFn derivative,
                             TensorFn second_derivative, double fd_step)
    : Field(dim, rank, variance, fd_step),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      second_(std::move(second_derivative)) {
  if (!value_) {
    throw ShapeError("field: value callable is required");
  }
}

Tensor FunctionField::value(const Point& y) const { return value_(y); }

Tensor FunctionField::derivative(const Point& y) const {
  if (derivative_) {
    return derivative_(y);
  }
  return Field::derivative(y);
}

FieldPtr FunctionField::derivative_field() const {
  if (derivative_ && rank() < 3) {
    return std::make_shared<FunctionField>(dim(), rank() + 1, variance(),
                                           derivative_, second_, TensorFn{},
                                           fd_step());
  }
  return Field::derivative_field();
}

FieldPtr make_field(int dim, int rank, Variance variance, TensorFn value,
                    TensorFn derivative, TensorFn second_derivative,
                    double fd_step) {
  return std::make_shared<FunctionField>(dim, rank, variance, std::move(value),
                                         std::move(derivative),
                                         std::move(second_derivative), fd_step);
}

FieldPtr zero_field(int dim, int rank, Variance variance) {
  auto zero = [dim, rank](const Point&) {
    return rank == 0 ? Tensor::scalar(0.0) : Tensor(dim, rank);
  };
  auto dzero = [dim, rank](const Point&) { return Tensor(dim, rank + 1); };
  auto ddzero = [dim, rank](const Point&) { return Tensor(dim, rank + 2); };
  return make_field(dim, rank, variance, zero, dzero, ddzero);
}

FieldPtr linear_combination(
    const std::vector<std::pair<double, FieldPtr>>& terms) {
  if (terms.empty()) {
    throw ShapeError("linear_combination: no terms");
  }
  const FieldPtr& first = terms.front().second;
  for (const auto& term : terms) {
    if (term.second->dim() != first->dim() ||
        term.second->rank() != first->rank() ||
        term.second->variance() != first->variance()) {
      throw ShapeError("linear_combination: incompatible fields");
    }
  }
  return std::make_shared<LinearCombinationField>(first->dim(), first->rank(),
                                                  first->variance(), terms);
}

FieldPtr pullback_field(FieldPtr field, std::function<Point(const Point&)> phi,
                        std::function<Mat(const Point&)> jacobian) {
  return std::make_shared<PullbackField>(std::move(field), std::move(phi),
                                         std::move(jacobian));
}

}  // namespace adscharge
