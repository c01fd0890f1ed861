#pragma once

#include <cstdint>
#include <string>

#include "embr/rng.hpp"
#include "embr/sim.hpp"

namespace embr {

enum class FuelMode { UniformSparse, Patchy };
enum class TerrainMode { Flat, Planar, DiamondSquare };
enum class WindMode { Fixed, ChangeAt30 };

// Recipe for one corpus row. inner/border default to the reference layout:
// a 100x100 vegetated region inside a zero ring of 5.
struct ScenarioSpec {
  FuelMode fuel_mode = FuelMode::UniformSparse;
  TerrainMode terrain_mode = TerrainMode::Flat;
  bool moisture_enabled = false;
  WindMode wind_mode = WindMode::Fixed;
  uint64_t rng_seed = 0;
  int inner = 100;
  int border = 5;

  int full() const { return inner + 2 * border; }
};

// The three named corpora: "wind", "wind-slope", "complex".
ScenarioSpec corpus_spec(const std::string& corpus, uint64_t seed);
std::string corpus_name(const ScenarioSpec& spec);

// 50% of cells fueled, density ~ N(1, 0.25) clamped at 0.
Field2D gen_uniform_fuel(Rng& rng, int n);

// Discs of radius 8 placed until >= 70% covered, then each covered cell
// cleared with probability 0.4; survivors get N(1, 0.25) clamped at 0.
Field2D gen_patchy_fuel(Rng& rng, int n);

// Z = tan(theta) * (m cos(phi) + n sin(phi)) * delta, shifted so min = 0.
// theta ~ U[0, pi/4], phi ~ U[0, 2pi).
Field2D gen_planar_terrain(Rng& rng, int size, double delta,
                           double* grade_out = nullptr,
                           double* azimuth_out = nullptr);

// Diamond-square on the smallest 2^k+1 grid covering `size`, cropped to the
// top-left window and rescaled to [0, 50] exactly.
Field2D gen_diamond_square(Rng& rng, int size, double max_height = 50.0,
                           double roughness = 1.0);

// |N(0, 0.25)| per cell.
Field2D gen_moisture(Rng& rng, int n);

WindSchedule gen_wind(const ScenarioSpec& spec, Rng& rng);

struct Scenario {
  SimState state;
  WindSchedule wind;
  int spot_i = 0, spot_j = 0;  // spot-fire center, padded coordinates
};

// Assembles the full initial state: fuel/moisture on the inner region
// zero-padded to the full field, terrain at full size, thresholds derived,
// and a radius-3 spot fire placed uniformly in the middle 50% of the inner
// field. Draw order is fixed: fuel, terrain, moisture, wind, spot center.
Scenario make_scenario(const ScenarioSpec& spec, Rng& rng,
                       const SimParams& params);

constexpr int kSpotRadius = 3;

}  // namespace embr
