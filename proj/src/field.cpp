#include "embr/field.hpp"

namespace embr {

void SimParams::validate() const {
  if (delta <= 0 || n_w <= 0 || n_h <= 0 || n_r <= 0 || d0 <= 0 || q0 <= 0 ||
      dt <= 0)
    throw Error(ErrorKind::Numeric, "SimParams: core parameters must be > 0");
  if (alpha_m < 0 || alpha_s < 0 || alpha_w < 0)
    throw Error(ErrorKind::Numeric, "SimParams: sensitivities must be >= 0");
}

Field2D zero_pad(const Field2D& field, int border) {
  if (border < 0)
    throw Error(ErrorKind::Numeric, "zero_pad: negative border");
  if (border == 0) return field;
  Field2D out(field.rows() + 2 * border, field.cols() + 2 * border, 0.0);
  for (int i = 0; i < field.rows(); ++i)
    for (int j = 0; j < field.cols(); ++j)
      out.at(i + border, j + border) = field.at(i, j);
  return out;
}

Field2D crop(const Field2D& field, int border) {
  if (border < 0) throw Error(ErrorKind::Numeric, "crop: negative border");
  if (border == 0) return field;
  if (field.rows() <= 2 * border || field.cols() <= 2 * border)
    throw Error(ErrorKind::Numeric, "crop: border exceeds field size");
  Field2D out(field.rows() - 2 * border, field.cols() - 2 * border);
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      out.at(i, j) = field.at(i + border, j + border);
  return out;
}

void terrain_gradient(const Field2D& z, double delta, Field2D& sx,
                      Field2D& sy) {
  if (z.rows() < 3 || z.cols() < 3)
    throw Error(ErrorKind::Numeric, "terrain_gradient: field must be >= 3x3");
  const int r = z.rows(), c = z.cols();
  sx = Field2D(r, c);
  sy = Field2D(r, c);
  const double inv2 = 1.0 / (2.0 * delta);
  const double inv1 = 1.0 / delta;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      if (i == 0)
        sx.at(i, j) = (z.at(1, j) - z.at(0, j)) * inv1;
      else if (i == r - 1)
        sx.at(i, j) = (z.at(r - 1, j) - z.at(r - 2, j)) * inv1;
      else
        sx.at(i, j) = (z.at(i + 1, j) - z.at(i - 1, j)) * inv2;

      if (j == 0)
        sy.at(i, j) = (z.at(i, 1) - z.at(i, 0)) * inv1;
      else if (j == c - 1)
        sy.at(i, j) = (z.at(i, c - 1) - z.at(i, c - 2)) * inv1;
      else
        sy.at(i, j) = (z.at(i, j + 1) - z.at(i, j - 1)) * inv2;
    }
  }
}

}  // namespace embr
