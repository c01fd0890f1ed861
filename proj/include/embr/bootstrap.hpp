#pragma once

#include <cstddef>
#include <vector>

#include "embr/rng.hpp"

namespace embr {

constexpr int kBootstrapSets = 20;

// n_sets index multisets of size n_sequences, i.i.d. uniform with
// replacement.
std::vector<std::vector<int>> resample(int n_sequences, int n_sets, Rng& rng);

// Ceiling order statistic: sorted ascending, element at 1-indexed position
// ceil(q * n). Keeps the 0.95 quantile of 20 samples a distinct order
// statistic (the 19th) rather than an interpolated value.
double quantile(std::vector<double> values, double q);

struct StepBand {
  double point = 0.0;  // estimate on the unresampled test set
  double q05 = 0.0, q25 = 0.0, q75 = 0.0, q95 = 0.0;
};

// per_seq[s][step]: one metric value per sequence and rollout step.
// Each bootstrap set's aggregate is the mean over its (collated) sequence
// draws at that step; the point estimate is the plain mean over sequences.
std::vector<StepBand> bands(const std::vector<std::vector<double>>& per_seq,
                            const std::vector<std::vector<int>>& sets);

}  // namespace embr
