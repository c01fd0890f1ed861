#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "embr/errors.hpp"

namespace embr {

// Dense 2D grid of doubles, row-major. The first index i runs along the
// field width (x/east), the second index j along the height (y/north).
class Field2D {
 public:
  Field2D() = default;
  Field2D(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0)
      throw Error(ErrorKind::Numeric, "Field2D: dimensions must be positive");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return v_.size(); }

  double& at(int i, int j) { return v_[static_cast<size_t>(i) * cols_ + j]; }
  double at(int i, int j) const {
    return v_[static_cast<size_t>(i) * cols_ + j];
  }
  double& operator[](size_t n) { return v_[n]; }
  double operator[](size_t n) const { return v_[n]; }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }

  bool same_shape(const Field2D& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool in_bounds(int i, int j) const {
    return i >= 0 && i < rows_ && j >= 0 && j < cols_;
  }

  void fill(double x) { v_.assign(v_.size(), x); }

  bool all_finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const Field2D& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

// Parameters of the analogue spread model. Defaults match the reference
// configuration used for all corpora.
struct SimParams {
  double delta = 1.0;   // lattice spacing
  int n_w = 110;        // field width in cells
  int n_h = 110;        // field height in cells
  int n_r = 3;          // neighborhood radius
  double d0 = 3.0;      // nominal burn duration
  double q0 = 3.0;      // nominal ignition heat
  double alpha_m = 1.0; // moisture sensitivity
  double alpha_s = 0.7; // slope sensitivity
  double alpha_w = 2.0; // wind sensitivity
  double dt = 1.0;      // time step (one simulation unit)

  void validate() const;
};

// Surrounds `field` with a ring of `border` zeros.
Field2D zero_pad(const Field2D& field, int border);

// Removes a ring of `border` cells; inverse of zero_pad.
Field2D crop(const Field2D& field, int border);

// Central-difference gradient of a terrain field, one-sided at the edges.
// sx holds dZ/dx (first index), sy holds dZ/dy (second index).
void terrain_gradient(const Field2D& z, double delta, Field2D& sx,
                      Field2D& sy);

}  // namespace embr
