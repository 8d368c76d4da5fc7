// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "adscharge/tensor.hpp"

namespace adscharge {

/// Index placement of a field.  `Contravariant` means the first index is up
/// and any further (derivative) indices are down.
enum class Variance { Covariant, Contravariant };

class Field;
using FieldPtr = std::shared_ptr<const Field>;
using TensorFn = std::function<Tensor(const Point&)>;

/// Default step of the finite-difference fallback.  The stencil is central
/// differencing at h and h/2 combined by one Richardson step (fourth order).
inline constexpr double default_fd_step = 2.0e-3;

/// Fourth-order derivative of `f` at `y`; the derivative index is appended.
Tensor fd_derivative(const TensorFn& f, const Point& y, double h);

/// A tensor field on a chart of R^n.  Fields are immutable.
class Field : public std::enable_shared_from_this<Field> {
 public:
  Field(int dim, int rank, Variance variance, double fd_step = default_fd_step);
  virtual ~Field() = default;

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  Variance variance() const { return variance_; }
  double fd_step() const { return fd_step_; }

  virtual Tensor value(const Point& y) const = 0;
  /// Coordinate partial derivatives; finite differences unless overridden.
  virtual Tensor derivative(const Point& y) const;
  virtual bool has_analytic_derivative() const { return false; }
  /// The field y -> derivative(y), carrying its own derivative.
  virtual FieldPtr derivative_field() const;

  Tensor second_derivative(const Point& y) const {
    return derivative_field()->derivative(y);
  }

 private:
  int dim_;
  int rank_;
  Variance variance_;
  double fd_step_;
};

/// Field given by callables.  Missing derivative callables fall back to
/// finite differences.
class FunctionField : public Field {
 public:
  FunctionField(int dim, int rank, Variance variance, TensorFn value,
                TensorFn derivative = {}, TensorFn second_derivative = {},
                double fd_step = default_fd_step);

  Tensor value(const Point& y) const override;
  Tensor derivative(const Point& y) const override;
  bool has_analytic_derivative() const override {
    return static_cast<bool>(derivative_);
  }
  FieldPtr derivative_field() const override;

 private:
  TensorFn value_;
  TensorFn derivative_;
  TensorFn second_;
};

FieldPtr make_field(int dim, int rank, Variance variance, TensorFn value,
                    TensorFn derivative = {}, TensorFn second_derivative = {},
                    double fd_step = default_fd_step);

/// Identically zero field with exact zero derivatives.
FieldPtr zero_field(int dim, int rank, Variance variance = Variance::Covariant);

/// sum_k c_k F_k; derivatives are combined from the terms' derivatives.
FieldPtr linear_combination(const std::vector<std::pair<double, FieldPtr>>& terms);

/// Pull back of a field by a diffeomorphism y -> phi(y) with Jacobian
/// J = d phi / dy.  Covariant indices transform with J, a contravariant
/// first index with J^{-1}.
FieldPtr pullback_field(FieldPtr field, std::function<Point(const Point&)> phi,
                        std::function<Mat(const Point&)> jacobian);

}  // namespace adscharge
