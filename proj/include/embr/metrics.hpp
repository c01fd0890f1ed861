#pragma once

#include <string>
#include <vector>

#include "embr/field.hpp"

namespace embr {

constexpr double kFireThreshold = 0.1;   // binarization for JSC / arrivals
constexpr int kSaHorizon = 10;           // shape-agreement saturation, steps

double mse(const Field2D& pred, const Field2D& truth);
double ste(const Field2D& pred, const Field2D& truth);

// Intersection-over-union of the strict > threshold binarizations.
// Empty union counts as perfect agreement (1.0).
double jsc(const Field2D& pred, const Field2D& truth,
           double threshold = kFireThreshold);

// Per cell, the first step index at which the front exceeds threshold;
// -1 for cells that never burn.
Field2D arrival_map(const std::vector<Field2D>& fronts,
                    double threshold = kFireThreshold);

// Temporal shape agreement: mean over cells burned in either series of
// 1 - min(|arrival gap|, horizon)/horizon; a cell burned in only one series
// takes the full penalty. Empty burn sets score 1.0.
double shape_agreement(const std::vector<Field2D>& pred_fronts,
                       const std::vector<Field2D>& truth_fronts,
                       double threshold = kFireThreshold,
                       int horizon = kSaHorizon);
// Same, from precomputed arrival maps.
double shape_agreement_from_arrivals(const Field2D& pred_arrival,
                                     const Field2D& truth_arrival,
                                     int horizon = kSaHorizon);

enum class Target { Front, Scar };
const char* target_name(Target t);

struct StepMetrics {
  int step = 0;
  Target target = Target::Front;
  double mse = 0.0;
  double ste = 0.0;
  double jsc = 0.0;
  double sa = 0.0;
};

// All four metrics per step for one target. SA at step s is computed over
// the first s+1 frames of both series (arrival maps grow incrementally).
std::vector<StepMetrics> evaluate_series(const std::vector<Field2D>& pred,
                                         const std::vector<Field2D>& truth,
                                         Target target,
                                         double threshold = kFireThreshold,
                                         int sa_horizon = kSaHorizon);

}  // namespace embr
