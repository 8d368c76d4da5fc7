// Distributed under the MIT License.
// See LICENSE.txt for details.

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace adscharge {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

/// Dense component array of rank 0..4 over R^n.  Storage is row-major with
/// the last index running fastest; derivative indices are always appended
/// last, so `d(i, j, k)` of a rank-2 field is the k-derivative of T_ij.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, int rank);

  static Tensor scalar(double value);
  static Tensor from_vec(const Vec& v);
  static Tensor from_mat(const Mat& m);

  int dim() const { return dim_; }
  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  double& operator()(int i) { return data_[static_cast<std::size_t>(i)]; }
  double operator()(int i) const { return data_[static_cast<std::size_t>(i)]; }
  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }
  double& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }
  double& operator()(int i, int j, int k, int l) {
    return data_[idx(i, j, k, l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return data_[idx(i, j, k, l)];
  }

  double as_scalar() const;
  Vec as_vec() const;
  Mat as_mat() const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  double max_abs() const;
  bool all_finite() const;
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i * dim_ + j);
  }
  std::size_t idx(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }
  std::size_t idx(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * dim_ + j) * dim_ + k) * dim_ + l);
  }

  int dim_ = 0;
  int rank_ = 0;
  std::vector<double> data_ = std::vector<double>(1, 0.0);
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(double s, Tensor a);

}  // namespace adscharge
