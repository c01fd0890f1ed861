#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "embr/field.hpp"

namespace embr {

// Neighborhood offsets within Euclidean radius n_r, center excluded.
struct Kernel {
  int radius = 0;
  std::vector<std::pair<int, int>> offsets;  // active (k, l) only
};

Kernel build_kernel(int n_r);

// Elliptical wind-bias geometry derived from the wind vector.
struct WindEllipse {
  double zeta = 1.0;  // length-to-width ratio
  double eps = 0.0;   // eccentricity
  double a = 0.0;     // semi-minor axis
  double b = 0.0;     // semi-major axis
  double ux = 0.0, uy = 0.0;
  double speed = 0.0;
};

WindEllipse wind_ellipse(double ux, double uy, double dt);

// Slope bias for propagation along (k, l) given the terrain gradient
// (sx, sy) at the contributing cell.
double slope_factor(double sx, double sy, int k, int l, double alpha_s);

// Wind bias for propagation along the unit direction (dx, dy). Returns 1
// exactly for near-zero wind.
double wind_factor(const WindEllipse& e, double dx, double dy, double alpha_w);

Field2D ignition_threshold(const Field2D& density, const Field2D& moisture,
                           const SimParams& params);
Field2D burn_duration(const Field2D& density, const SimParams& params);

// Piecewise-constant wind over time, first segment starts at step 0.
struct WindSchedule {
  struct Segment {
    int start_step = 0;
    double ux = 0.0, uy = 0.0;
  };
  std::vector<Segment> segments;

  std::pair<double, double> wind_at(int step) const;
};

// Full mutable state of one fire. t_ign uses -1 as "unset".
struct SimState {
  Field2D q;         // accumulated heat
  Field2D burning;   // ignition state, 0 or 1
  Field2D t_ign;     // step of ignition, -1 if unset
  Field2D fuel;      // remaining vegetation
  Field2D scar;      // cumulative burned fuel
  Field2D density;   // initial vegetation density R
  Field2D moisture;  // moisture content M
  Field2D altitude;  // terrain Z
  Field2D q_ign;     // per-cell ignition threshold
  Field2D burn_dur;  // per-cell burn duration D
  Field2D slope_x, slope_y;  // precomputed terrain gradient
  int clock = 0;

  bool any_burning() const;
};

// Derives q_ign, burn_dur and the terrain gradient from the static fields.
SimState make_sim_state(const Field2D& density, const Field2D& moisture,
                        const Field2D& altitude, const SimParams& params);

// Lights every fueled cell within Euclidean distance <= radius of center:
// burning = 1, q = q_ign, t_ign = 0.
void ignite_spot(SimState& state, int ci, int cj, int radius);

// Advances the state by one time step under wind (ux, uy). If consumed_out
// is non-null it receives the fuel consumed per cell during this step.
void step(SimState& state, const SimParams& params, const Kernel& kernel,
          double ux, double uy, Field2D* consumed_out = nullptr);

// Per-step record of one simulated fire.
struct FireFrame {
  Field2D front;  // fuel consumed during this step
  Field2D scar;   // cumulative burned fuel
  Field2D fuel;   // remaining vegetation
};

struct SequenceMeta {
  uint64_t seed = 0;
  uint64_t sequence_index = 0;
  std::string corpus;  // "wind", "wind-slope", "complex" or freeform
  int burnout_step = 0;
  bool truncated = false;
  bool predicted = false;
};

struct FireSequence {
  Field2D density, altitude, moisture;
  std::vector<FireFrame> frames;
  WindSchedule wind;
  SequenceMeta meta;

  int steps() const { return static_cast<int>(frames.size()); }
};

constexpr int kDefaultMaxSteps = 400;

// Runs until no cell is burning or max_steps is reached; always records at
// least one frame. Hitting the cap sets meta.truncated.
FireSequence simulate(SimState initial, const SimParams& params,
                      const WindSchedule& schedule,
                      int max_steps = kDefaultMaxSteps);

}  // namespace embr
