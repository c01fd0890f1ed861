#include <cmath>

#include "embr/neural.hpp"

namespace embr {

namespace {
void check_conv_shapes(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.rank() != 3 || w.rank() != 4 || b.rank() != 1)
    throw Error(ErrorKind::Numeric, "conv2d: bad ranks");
  if (w.dim(0) != w.dim(1) || w.dim(0) % 2 == 0)
    throw Error(ErrorKind::Numeric, "conv2d: kernel must be square and odd");
  if (w.dim(2) != x.dim(2) || b.dim(0) != w.dim(3))
    throw Error(ErrorKind::Numeric, "conv2d: channel mismatch");
}
}  // namespace

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    Tensor& y) {
  check_conv_shapes(x, w, b);
  const int h = x.dim(0), wd = x.dim(1), cin = x.dim(2);
  const int k = w.dim(0), cout = w.dim(3);
  const int off = k / 2;
  if (y.shape() != std::vector<int>{h, wd, cout})
    y = Tensor({h, wd, cout});

  const double* xd = x.data();
  const double* wdp = w.data();
  const double* bd = b.data();
  double* yd = y.data();

  std::vector<double> acc(cout);
  for (int p = 0; p < h; ++p) {
    for (int q = 0; q < wd; ++q) {
      for (int oc = 0; oc < cout; ++oc) acc[oc] = bd[oc];
      const int ky0 = std::max(0, off - p), ky1 = std::min(k, h + off - p);
      const int kx0 = std::max(0, off - q), kx1 = std::min(k, wd + off - q);
      for (int ky = ky0; ky < ky1; ++ky) {
        const int row = p + ky - off;
        for (int kx = kx0; kx < kx1; ++kx) {
          const int col = q + kx - off;
          const double* xp = xd + (static_cast<size_t>(row) * wd + col) * cin;
          const double* wp =
              wdp + ((static_cast<size_t>(ky) * k + kx) * cin) * cout;
          for (int ic = 0; ic < cin; ++ic) {
            const double xv = xp[ic];
            const double* wrow = wp + static_cast<size_t>(ic) * cout;
            for (int oc = 0; oc < cout; ++oc) acc[oc] += xv * wrow[oc];
          }
        }
      }
      double* yp = yd + (static_cast<size_t>(p) * wd + q) * cout;
      for (int oc = 0; oc < cout; ++oc) yp[oc] = acc[oc];
    }
  }
}

void conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& gy,
                     Tensor* gx, Tensor& gw, Tensor& gb) {
  check_conv_shapes(x, w, gb);
  const int h = x.dim(0), wd = x.dim(1), cin = x.dim(2);
  const int k = w.dim(0), cout = w.dim(3);
  const int off = k / 2;
  if (gy.shape() != std::vector<int>{h, wd, cout})
    throw Error(ErrorKind::Numeric, "conv2d_backward: gy shape");
  if (!gw.same_shape(w))
    throw Error(ErrorKind::Numeric, "conv2d_backward: gw shape");
  if (gx) {
    if (gx->shape() != x.shape()) *gx = Tensor({h, wd, cin});
    gx->zero();
  }

  const double* xd = x.data();
  const double* wdp = w.data();
  const double* gyd = gy.data();
  double* gwd = gw.data();
  double* gbd = gb.data();
  double* gxd = gx ? gx->data() : nullptr;

  for (int p = 0; p < h; ++p) {
    for (int q = 0; q < wd; ++q) {
      const double* gyp = gyd + (static_cast<size_t>(p) * wd + q) * cout;
      for (int oc = 0; oc < cout; ++oc) gbd[oc] += gyp[oc];
      const int ky0 = std::max(0, off - p), ky1 = std::min(k, h + off - p);
      const int kx0 = std::max(0, off - q), kx1 = std::min(k, wd + off - q);
      for (int ky = ky0; ky < ky1; ++ky) {
        const int row = p + ky - off;
        for (int kx = kx0; kx < kx1; ++kx) {
          const int col = q + kx - off;
          const size_t xoff = (static_cast<size_t>(row) * wd + col) * cin;
          const double* xp = xd + xoff;
          const size_t woff = ((static_cast<size_t>(ky) * k + kx) * cin) * cout;
          const double* wp = wdp + woff;
          double* gwp = gwd + woff;
          if (gxd) {
            double* gxp = gxd + xoff;
            for (int ic = 0; ic < cin; ++ic) {
              const double xv = xp[ic];
              const double* wrow = wp + static_cast<size_t>(ic) * cout;
              double* gwrow = gwp + static_cast<size_t>(ic) * cout;
              double s = 0.0;
              for (int oc = 0; oc < cout; ++oc) {
                const double g = gyp[oc];
                s += wrow[oc] * g;
                gwrow[oc] += xv * g;
              }
              gxp[ic] += s;
            }
          } else {
            for (int ic = 0; ic < cin; ++ic) {
              const double xv = xp[ic];
              double* gwrow = gwp + static_cast<size_t>(ic) * cout;
              for (int oc = 0; oc < cout; ++oc) gwrow[oc] += xv * gyp[oc];
            }
          }
        }
      }
    }
  }
}

void relu_forward(const Tensor& x, Tensor& y) {
  if (!y.same_shape(x)) y = Tensor(x.shape());
  for (size_t n = 0; n < x.size(); ++n) y[n] = x[n] > 0.0 ? x[n] : 0.0;
}

void relu_backward(const Tensor& x, const Tensor& gy, Tensor& gx) {
  if (!gx.same_shape(x)) gx = Tensor(x.shape());
  for (size_t n = 0; n < x.size(); ++n) gx[n] = x[n] > 0.0 ? gy[n] : 0.0;
}

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

void convlstm_cell_forward(const ConvLstmParams& p, const Tensor& x,
                           const Tensor& h_prev, const Tensor& c_prev,
                           ConvLstmCache& cache) {
  const int f4 = p.b.dim(0);
  const int f = f4 / 4;
  const int h = x.dim(0), wd = x.dim(1);

  conv2d_forward(x, p.wx, p.b, cache.z);
  // add the recurrent term with a zero bias
  Tensor zero_b({f4}, 0.0);
  Tensor zh;
  conv2d_forward(h_prev, p.wh, zero_b, zh);
  for (size_t n = 0; n < cache.z.size(); ++n) cache.z[n] += zh[n];

  if (!cache.c.same_shape(c_prev)) cache.c = Tensor({h, wd, f});
  if (!cache.h.same_shape(c_prev)) cache.h = Tensor({h, wd, f});
  const double* zd = cache.z.data();
  const double* cp = c_prev.data();
  double* cd = cache.c.data();
  double* hd = cache.h.data();
  const size_t pixels = static_cast<size_t>(h) * wd;
  for (size_t px = 0; px < pixels; ++px) {
    const double* z = zd + px * f4;
    for (int u = 0; u < f; ++u) {
      const double gi = sigmoid(z[u]);
      const double gf = sigmoid(z[f + u]);
      const double gg = std::tanh(z[2 * f + u]);
      const double go = sigmoid(z[3 * f + u]);
      const double c = gf * cp[px * f + u] + gi * gg;
      cd[px * f + u] = c;
      hd[px * f + u] = go * std::tanh(c);
    }
  }
}

}  // namespace embr
