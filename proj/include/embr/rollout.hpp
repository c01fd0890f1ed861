#pragma once

#include <memory>
#include <string>
#include <vector>

#include "embr/dataset.hpp"
#include "embr/neural.hpp"

namespace embr {

// Fixed position of the front channel in the corpus channel order.
constexpr int kFrontChannel = 2;

// A pluggable one-step forecaster. The window is (T, H, W, C) in
// normalized units; the returned front is in physical fuel-consumption
// units (the rollout owns the normalization boundary).
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Field2D predict(const Tensor& window, int step) = 0;
};

struct RolloutResult {
  int t_start = 0;
  std::vector<Field2D> fronts;  // predicted, physical units
  std::vector<Field2D> scars;   // running sum of predictions + seed scar
  std::vector<Field2D> fuels;   // vegetation channel, clamped at 0

  // Truth frames aligned step-for-step; past burnout the front is all
  // zeros and the scar holds its final value.
  std::vector<Field2D> truth_fronts;
  std::vector<Field2D> truth_scars;

  // Repackages the prediction as a sequence sharing the truth statics and
  // wind, with meta.predicted set.
  FireSequence as_sequence(const FireSequence& truth) const;
};

// Algorithm-1 style autoregression: seed the window at t_start (history
// before frame 0 replicates frame 0), then per step subtract the
// prediction from vegetation (clamp at 0), add it to the scar, set the
// front to it, refresh the wind planes, and slide the window.
RolloutResult autoregress(Predictor& pred, const FireSequence& seq,
                          const NormStats& norm,
                          const std::vector<std::string>& channels,
                          int t_start = 0, int steps = 50, int window = 10);

// Baselines. The oracle echoes the true next front; past the end of the
// truth it errors, or returns zeros when extend is set (matches the truth
// extension rule used for alignment).
std::unique_ptr<Predictor> oracle_predictor(const FireSequence& seq,
                                            int t_start = 0,
                                            bool extend = false);
std::unique_ptr<Predictor> zero_predictor();
// Echoes the front plane of the newest window frame (denormalized).
std::unique_ptr<Predictor> persistence_predictor(const NormStats& norm);

// Wraps a trained model; denormalizes its output with the front stats.
std::unique_ptr<Predictor> neural_predictor(Model& model,
                                            const NormStats& norm);

}  // namespace embr
