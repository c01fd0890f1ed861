#include "embr/sim.hpp"

#include <algorithm>
#include <cmath>

namespace embr {

namespace {
constexpr double kWindEps = 1e-9;
}

Kernel build_kernel(int n_r) {
  if (n_r < 1) throw Error(ErrorKind::Numeric, "build_kernel: n_r must be >= 1");
  Kernel k;
  k.radius = n_r;
  for (int dx = -n_r; dx <= n_r; ++dx) {
    for (int dy = -n_r; dy <= n_r; ++dy) {
      if (dx == 0 && dy == 0) continue;
      // Heaviside with S(0) = 1: include radius-exactly-n_r offsets.
      if (std::sqrt(double(dx) * dx + double(dy) * dy) <= double(n_r))
        k.offsets.emplace_back(dx, dy);
    }
  }
  return k;
}

WindEllipse wind_ellipse(double ux, double uy, double dt) {
  WindEllipse e;
  e.ux = ux;
  e.uy = uy;
  e.speed = std::sqrt(ux * ux + uy * uy);
  e.zeta = 1.0 + e.speed / 4.0;
  e.eps = std::sqrt(1.0 - 1.0 / (e.zeta * e.zeta));
  e.a = e.speed * dt / (1.0 + e.eps);
  e.b = e.a / e.zeta;
  return e;
}

double slope_factor(double sx, double sy, int k, int l, double alpha_s) {
  if (k == 0 && l == 0)
    throw Error(ErrorKind::Numeric, "slope_factor: zero offset");
  const double norm = std::sqrt(double(k) * k + double(l) * l);
  return std::exp(alpha_s * (k * sx + l * sy) / norm);
}

double wind_factor(const WindEllipse& e, double dx, double dy,
                   double alpha_w) {
  if (dx == 0.0 && dy == 0.0)
    throw Error(ErrorKind::Numeric, "wind_factor: zero direction");
  if (e.speed < kWindEps) return 1.0;  // no wind, no bias
  const double dn = std::sqrt(dx * dx + dy * dy);
  double ct = (e.ux * dx + e.uy * dy) / (e.speed * dn);
  ct = std::clamp(ct, -1.0, 1.0);
  const double st2 = 1.0 - ct * ct;
  const double gamma = std::sqrt(e.a * e.a * st2 - e.a * e.a * e.eps * e.eps * st2 +
                                 e.b * e.b * ct * ct);
  const double num = e.a * e.b * e.b * e.eps * ct + e.a * e.b * gamma;
  const double den = e.a * e.a * st2 + e.b * e.b * ct * ct;
  return 1.0 + alpha_w * num / den;
}

Field2D ignition_threshold(const Field2D& density, const Field2D& moisture,
                           const SimParams& params) {
  if (!density.same_shape(moisture))
    throw Error(ErrorKind::Numeric, "ignition_threshold: shape mismatch");
  Field2D out(density.rows(), density.cols());
  for (size_t n = 0; n < out.size(); ++n)
    out[n] = params.q0 * density[n] + params.alpha_m * moisture[n];
  return out;
}

Field2D burn_duration(const Field2D& density, const SimParams& params) {
  Field2D out(density.rows(), density.cols());
  for (size_t n = 0; n < out.size(); ++n) out[n] = params.d0 * density[n];
  return out;
}

std::pair<double, double> WindSchedule::wind_at(int step) const {
  double ux = 0.0, uy = 0.0;
  for (const auto& seg : segments) {
    if (seg.start_step > step) break;
    ux = seg.ux;
    uy = seg.uy;
  }
  return {ux, uy};
}

bool SimState::any_burning() const {
  for (size_t n = 0; n < burning.size(); ++n)
    if (burning[n] != 0.0) return true;
  return false;
}

SimState make_sim_state(const Field2D& density, const Field2D& moisture,
                        const Field2D& altitude, const SimParams& params) {
  if (!density.same_shape(moisture) || !density.same_shape(altitude))
    throw Error(ErrorKind::Numeric, "make_sim_state: shape mismatch");
  SimState s;
  const int r = density.rows(), c = density.cols();
  s.q = Field2D(r, c, 0.0);
  s.burning = Field2D(r, c, 0.0);
  s.t_ign = Field2D(r, c, -1.0);
  s.fuel = density;
  s.scar = Field2D(r, c, 0.0);
  s.density = density;
  s.moisture = moisture;
  s.altitude = altitude;
  s.q_ign = ignition_threshold(density, moisture, params);
  s.burn_dur = burn_duration(density, params);
  terrain_gradient(altitude, params.delta, s.slope_x, s.slope_y);
  s.clock = 0;
  return s;
}

void ignite_spot(SimState& state, int ci, int cj, int radius) {
  if (!state.burning.in_bounds(ci, cj))
    throw Error(ErrorKind::Numeric, "ignite_spot: center out of range");
  for (int di = -radius; di <= radius; ++di) {
    for (int dj = -radius; dj <= radius; ++dj) {
      if (di * di + dj * dj > radius * radius) continue;
      const int i = ci + di, j = cj + dj;
      if (!state.burning.in_bounds(i, j)) continue;
      if (state.density.at(i, j) <= 0.0) continue;
      state.burning.at(i, j) = 1.0;
      state.q.at(i, j) = state.q_ign.at(i, j);
      state.t_ign.at(i, j) = 0.0;
    }
  }
}

void step(SimState& state, const SimParams& params, const Kernel& kernel,
          double ux, double uy, Field2D* consumed_out) {
  const int rows = state.q.rows(), cols = state.q.cols();
  if (!state.q.same_shape(state.burning) || !state.q.same_shape(state.fuel))
    throw Error(ErrorKind::Numeric, "step: state field shape mismatch");

  // Per-offset wind bias is constant across the field for uniform wind.
  const WindEllipse ellipse = wind_ellipse(ux, uy, params.dt);
  const size_t n_off = kernel.offsets.size();
  std::vector<double> psi(n_off);
  std::vector<double> inv_norm(n_off);
  for (size_t o = 0; o < n_off; ++o) {
    const auto [k, l] = kernel.offsets[o];
    const double norm = std::sqrt(double(k) * k + double(l) * l);
    inv_norm[o] = 1.0 / norm;
    psi[o] = wind_factor(ellipse, k, l, params.alpha_w);
  }

  // (1) Heat update. Scatter form: every burning source cell radiates to
  // its kernel neighbors along the propagation direction d = offset. The
  // slope bias uses the gradient at the source (the burning cell).
  Field2D q_new = state.q;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (state.burning.at(i, j) == 0.0) continue;
      const double sx = state.slope_x.at(i, j);
      const double sy = state.slope_y.at(i, j);
      const bool flat = (sx == 0.0 && sy == 0.0);
      for (size_t o = 0; o < n_off; ++o) {
        const auto [k, l] = kernel.offsets[o];
        const int ri = i + k, rj = j + l;
        if (ri < 0 || ri >= rows || rj < 0 || rj >= cols) continue;
        const double phi =
            flat ? 1.0
                 : std::exp(params.alpha_s * (k * sx + l * sy) * inv_norm[o]);
        q_new.at(ri, rj) += phi * psi[o];
      }
    }
  }
  state.q = std::move(q_new);

  // (2) Ignition times: unburnt cells reaching their threshold ignite now.
  // (3) Burn state: on iff threshold reached and inside the burn window.
  // (4) Fuel bookkeeping: burning cells consume density/duration per step.
  if (consumed_out) *consumed_out = Field2D(rows, cols, 0.0);
  const double t_now = static_cast<double>(state.clock);
  for (size_t n = 0; n < state.q.size(); ++n) {
    if (state.t_ign[n] < 0.0 && state.q[n] >= state.q_ign[n])
      state.t_ign[n] = t_now;
    const bool lit = state.t_ign[n] >= 0.0 && state.q[n] >= state.q_ign[n] &&
                     (t_now - state.t_ign[n]) < state.burn_dur[n];
    state.burning[n] = lit ? 1.0 : 0.0;
    if (lit) {
      const double rate =
          state.burn_dur[n] > 0.0 ? state.density[n] / state.burn_dur[n] : 0.0;
      const double consumed = std::min(rate, state.fuel[n]);
      state.fuel[n] -= consumed;
      state.scar[n] += consumed;
      if (consumed_out) (*consumed_out)[n] = consumed;
    }
  }

  // (5) Advance the clock.
  state.clock += 1;
}

FireSequence simulate(SimState initial, const SimParams& params,
                      const WindSchedule& schedule, int max_steps) {
  if (max_steps < 1)
    throw Error(ErrorKind::Numeric, "simulate: max_steps must be >= 1");
  const Kernel kernel = build_kernel(params.n_r);

  FireSequence seq;
  seq.density = initial.density;
  seq.altitude = initial.altitude;
  seq.moisture = initial.moisture;
  seq.wind = schedule;

  SimState state = std::move(initial);
  Field2D consumed;
  for (int i = 0; i < max_steps; ++i) {
    const auto [ux, uy] = schedule.wind_at(state.clock);
    step(state, params, kernel, ux, uy, &consumed);
    seq.frames.push_back({consumed, state.scar, state.fuel});
    if (!state.any_burning()) break;
  }
  seq.meta.burnout_step = static_cast<int>(seq.frames.size());
  seq.meta.truncated = state.any_burning();
  return seq;
}

}  // namespace embr
