// Distributed under the MIT License.
// See LICENSE.txt for details.

#include "adscharge/tensor.hpp"

#include <cmath>

#include "adscharge/errors.hpp"

namespace adscharge {

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
  if (dim < 1 || rank < 0 || rank > 4) {
    throw ShapeError("tensor: unsupported dimension or rank");
  }
  std::size_t n = 1;
  for (int r = 0; r < rank; ++r) {
    n *= static_cast<std::size_t>(dim);
  }
  data_.assign(n, 0.0);
}

Tensor Tensor::scalar(double value) {
  Tensor t;
  t.data_[0] = value;
  return t;
}

Tensor Tensor::from_vec(const Vec& v) {
  Tensor t(static_cast<int>(v.size()), 1);
  for (int i = 0; i < v.size(); ++i) {
    t(i) = v(i);
  }
  return t;
}

Tensor Tensor::from_mat(const Mat& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("tensor: matrix must be square");
  }
  const int n = static_cast<int>(m.rows());
  Tensor t(n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      t(i, j) = m(i, j);
    }
  }
  return t;
}

double Tensor::as_scalar() const {
  if (rank_ != 0) {
    throw ShapeError("tensor: expected a scalar");
  }
  return data_[0];
}

Vec Tensor::as_vec() const {
  if (rank_ != 1) {
    throw ShapeError("tensor: expected rank 1");
  }
  return Eigen::Map<const Vec>(data_.data(), dim_);
}

Mat Tensor::as_mat() const {
  if (rank_ != 2) {
    throw ShapeError("tensor: expected rank 2");
  }
  Mat m(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      m(i, j) = (*this)(i, j);
    }
  }
  return m;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.rank_ != rank_ || other.data_.size() != data_.size()) {
    throw ShapeError("tensor: shape mismatch in addition");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    data_[k] += other.data_[k];
  }
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (other.rank_ != rank_ || other.data_.size() != data_.size()) {
    throw ShapeError("tensor: shape mismatch in subtraction");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    data_[k] -= other.data_[k];
  }
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& x : data_) {
    x *= s;
  }
  return *this;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double x : data_) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

bool Tensor::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(double s, Tensor a) { return a *= s; }

}  // namespace adscharge
