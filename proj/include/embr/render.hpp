#pragma once

#include <string>

#include "embr/sim.hpp"

namespace embr {

// 8-bit binary P5 PGM, min-max scaled over the field; a constant field
// renders all black.
void write_pgm(const std::string& path, const Field2D& field);

// Side-by-side P6 PPM: prediction | truth | signed difference, the last
// panel red where the prediction overshoots and blue where it misses.
void write_comparison_ppm(const std::string& path, const Field2D& pred,
                          const Field2D& truth);

// One PGM per frame of the named channel ("front", "scar" or "fuel") into
// out_dir, files frame_00000.pgm ...
void render_sequence(const FireSequence& seq, const std::string& channel,
                     const std::string& out_dir);

}  // namespace embr
