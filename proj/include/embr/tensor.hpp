#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

#include "embr/errors.hpp"
#include "embr/field.hpp"

namespace embr {

// Dense tensor with up to 4 axes, row-major, last axis contiguous.
// Conventions in this project: (H, W, C) for single frames and
// (T, H, W, C) for time windows.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    size_t n = 1;
    for (int d : shape_) {
      if (d <= 0) throw Error(ErrorKind::Numeric, "Tensor: bad dimension");
      n *= static_cast<size_t>(d);
    }
    v_.assign(n, fill);
  }

  const std::vector<int>& shape() const { return shape_; }
  int dim(int i) const { return shape_[i]; }
  int rank() const { return static_cast<int>(shape_.size()); }
  size_t size() const { return v_.size(); }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  double& operator[](size_t n) { return v_[n]; }
  double operator[](size_t n) const { return v_[n]; }

  // (H, W, C) access
  double& at3(int i, int j, int c) {
    return v_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + c];
  }
  double at3(int i, int j, int c) const {
    return v_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + c];
  }
  // (T, H, W, C) access
  double& at4(int t, int i, int j, int c) {
    return v_[((static_cast<size_t>(t) * shape_[1] + i) * shape_[2] + j) *
                  shape_[3] +
              c];
  }
  double at4(int t, int i, int j, int c) const {
    return v_[((static_cast<size_t>(t) * shape_[1] + i) * shape_[2] + j) *
                  shape_[3] +
              c];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  void zero() { v_.assign(v_.size(), 0.0); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::vector<int> shape_;
  std::vector<double> v_;
};

}  // namespace embr
