#include "embr/worldgen.hpp"

#include <algorithm>
#include <cmath>

namespace embr {

ScenarioSpec corpus_spec(const std::string& corpus, uint64_t seed) {
  ScenarioSpec s;
  s.rng_seed = seed;
  if (corpus == "wind") {
    // defaults already match
  } else if (corpus == "wind-slope") {
    s.terrain_mode = TerrainMode::Planar;
  } else if (corpus == "complex") {
    s.fuel_mode = FuelMode::Patchy;
    s.terrain_mode = TerrainMode::DiamondSquare;
    s.moisture_enabled = true;
    s.wind_mode = WindMode::ChangeAt30;
  } else {
    throw Error(ErrorKind::Usage, "unknown corpus: " + corpus);
  }
  return s;
}

std::string corpus_name(const ScenarioSpec& spec) {
  if (spec.fuel_mode == FuelMode::Patchy) return "complex";
  if (spec.terrain_mode == TerrainMode::Planar) return "wind-slope";
  return "wind";
}

Field2D gen_uniform_fuel(Rng& rng, int n) {
  Field2D out(n, n, 0.0);
  for (size_t c = 0; c < out.size(); ++c) {
    if (rng.uniform() < 0.5)
      out[c] = std::max(0.0, rng.normal(1.0, 0.25));
  }
  return out;
}

Field2D gen_patchy_fuel(Rng& rng, int n) {
  constexpr int kDiscRadius = 8;
  Field2D covered(n, n, 0.0);
  size_t n_covered = 0;
  const size_t target = static_cast<size_t>(std::ceil(0.70 * n * n));
  while (n_covered < target) {
    const int ci = static_cast<int>(rng.uniform_int(n));
    const int cj = static_cast<int>(rng.uniform_int(n));
    for (int di = -kDiscRadius; di <= kDiscRadius; ++di) {
      for (int dj = -kDiscRadius; dj <= kDiscRadius; ++dj) {
        if (di * di + dj * dj > kDiscRadius * kDiscRadius) continue;
        const int i = ci + di, j = cj + dj;
        if (!covered.in_bounds(i, j)) continue;  // discs clip at the edges
        if (covered.at(i, j) == 0.0) {
          covered.at(i, j) = 1.0;
          ++n_covered;
        }
      }
    }
  }
  Field2D out(n, n, 0.0);
  for (size_t c = 0; c < out.size(); ++c) {
    if (covered[c] == 0.0) continue;
    if (rng.uniform() < 0.4) continue;  // mask clears i.i.d. 40%
    out[c] = std::max(0.0, rng.normal(1.0, 0.25));
  }
  return out;
}

Field2D gen_planar_terrain(Rng& rng, int size, double delta, double* grade_out,
                           double* azimuth_out) {
  const double theta = rng.uniform(0.0, M_PI / 4.0);
  const double phi = rng.uniform(0.0, 2.0 * M_PI);
  if (grade_out) *grade_out = theta;
  if (azimuth_out) *azimuth_out = phi;
  const double t = std::tan(theta);
  const double cx = std::cos(phi), cy = std::sin(phi);
  Field2D z(size, size);
  double zmin = 0.0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      z.at(i, j) = t * (i * cx + j * cy) * delta;
      zmin = std::min(zmin, z.at(i, j));
    }
  for (size_t c = 0; c < z.size(); ++c) z[c] -= zmin;
  return z;
}

Field2D gen_diamond_square(Rng& rng, int size, double max_height,
                           double roughness) {
  int grid = 1;
  while (grid + 1 < size) grid *= 2;
  const int n = grid + 1;  // 2^k + 1 >= size

  Field2D z(n, n, 0.0);
  z.at(0, 0) = rng.uniform();
  z.at(0, n - 1) = rng.uniform();
  z.at(n - 1, 0) = rng.uniform();
  z.at(n - 1, n - 1) = rng.uniform();

  double amp = roughness;
  for (int stepw = grid; stepw > 1; stepw /= 2, amp *= 0.5) {
    const int half = stepw / 2;
    // diamond step: centers of squares
    for (int i = half; i < n; i += stepw) {
      for (int j = half; j < n; j += stepw) {
        const double avg = 0.25 * (z.at(i - half, j - half) +
                                   z.at(i - half, j + half) +
                                   z.at(i + half, j - half) +
                                   z.at(i + half, j + half));
        z.at(i, j) = avg + amp * rng.uniform(-1.0, 1.0);
      }
    }
    // square step: edge midpoints, wrapping neighbors dropped at borders
    for (int i = 0; i < n; i += half) {
      for (int j = ((i / half) % 2 == 0) ? half : 0; j < n; j += stepw) {
        double sum = 0.0;
        int cnt = 0;
        if (i - half >= 0) { sum += z.at(i - half, j); ++cnt; }
        if (i + half < n) { sum += z.at(i + half, j); ++cnt; }
        if (j - half >= 0) { sum += z.at(i, j - half); ++cnt; }
        if (j + half < n) { sum += z.at(i, j + half); ++cnt; }
        z.at(i, j) = sum / cnt + amp * rng.uniform(-1.0, 1.0);
      }
    }
  }

  // crop the top-left window, then rescale to [0, max_height] exactly
  Field2D out(size, size);
  double lo = z.at(0, 0), hi = z.at(0, 0);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      out.at(i, j) = z.at(i, j);
      lo = std::min(lo, out.at(i, j));
      hi = std::max(hi, out.at(i, j));
    }
  if (hi > lo) {
    const double scale = max_height / (hi - lo);
    for (size_t c = 0; c < out.size(); ++c) out[c] = (out[c] - lo) * scale;
  } else {
    out.fill(0.0);
  }
  return out;
}

Field2D gen_moisture(Rng& rng, int n) {
  Field2D out(n, n);
  for (size_t c = 0; c < out.size(); ++c)
    out[c] = std::fabs(rng.normal(0.0, 0.25));
  return out;
}

WindSchedule gen_wind(const ScenarioSpec& spec, Rng& rng) {
  WindSchedule w;
  if (spec.wind_mode == WindMode::Fixed) {
    w.segments.push_back({0, rng.uniform(-7.0, 7.0), rng.uniform(-7.0, 7.0)});
  } else {
    w.segments.push_back({0, rng.uniform(-12.0, 12.0), rng.uniform(-12.0, 12.0)});
    w.segments.push_back({30, rng.uniform(-12.0, 12.0), rng.uniform(-12.0, 12.0)});
  }
  return w;
}

Scenario make_scenario(const ScenarioSpec& spec, Rng& rng,
                       const SimParams& params) {
  const int n = spec.inner;
  const int full = spec.full();

  Field2D fuel_inner = spec.fuel_mode == FuelMode::UniformSparse
                           ? gen_uniform_fuel(rng, n)
                           : gen_patchy_fuel(rng, n);

  Field2D terrain;
  switch (spec.terrain_mode) {
    case TerrainMode::Flat:
      terrain = Field2D(full, full, 0.0);
      break;
    case TerrainMode::Planar:
      terrain = gen_planar_terrain(rng, full, params.delta);
      break;
    case TerrainMode::DiamondSquare:
      terrain = gen_diamond_square(rng, full);
      break;
  }

  Field2D moisture = spec.moisture_enabled
                         ? zero_pad(gen_moisture(rng, n), spec.border)
                         : Field2D(full, full, 0.0);

  Scenario sc;
  sc.wind = gen_wind(spec, rng);
  sc.state = make_sim_state(zero_pad(fuel_inner, spec.border), moisture,
                            terrain, params);

  // spot-fire center uniform per axis in the middle 50% of the inner field
  sc.spot_i = spec.border + n / 4 + static_cast<int>(rng.uniform_int(n / 2));
  sc.spot_j = spec.border + n / 4 + static_cast<int>(rng.uniform_int(n / 2));
  ignite_spot(sc.state, sc.spot_i, sc.spot_j, kSpotRadius);
  return sc;
}

}  // namespace embr
