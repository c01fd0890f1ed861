#include "embr/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "embr/errors.hpp"

namespace embr {

std::vector<std::vector<int>> resample(int n_sequences, int n_sets, Rng& rng) {
  if (n_sequences < 1)
    throw Error(ErrorKind::Numeric, "resample: need at least one sequence");
  std::vector<std::vector<int>> sets(n_sets);
  for (auto& set : sets) {
    set.resize(n_sequences);
    for (auto& idx : set)
      idx = static_cast<int>(rng.uniform_int(n_sequences));
  }
  return sets;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty())
    throw Error(ErrorKind::Numeric, "quantile: empty list");
  if (q <= 0.0 || q >= 1.0)
    throw Error(ErrorKind::Numeric, "quantile: q must be in (0, 1)");
  std::sort(values.begin(), values.end());
  const size_t pos =
      static_cast<size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<size_t>(pos, 1) - 1];
}

std::vector<StepBand> bands(const std::vector<std::vector<double>>& per_seq,
                            const std::vector<std::vector<int>>& sets) {
  if (per_seq.empty())
    throw Error(ErrorKind::Numeric, "bands: no sequences");
  const size_t n_steps = per_seq[0].size();
  for (const auto& s : per_seq)
    if (s.size() != n_steps)
      throw Error(ErrorKind::Numeric, "bands: mismatched curve lengths");

  std::vector<StepBand> out(n_steps);
  std::vector<double> agg(sets.size());
  for (size_t step = 0; step < n_steps; ++step) {
    double point = 0.0;
    for (const auto& s : per_seq) point += s[step];
    out[step].point = point / static_cast<double>(per_seq.size());

    for (size_t b = 0; b < sets.size(); ++b) {
      double sum = 0.0;
      for (int idx : sets[b]) sum += per_seq[idx][step];
      agg[b] = sum / static_cast<double>(sets[b].size());
    }
    out[step].q05 = quantile(agg, 0.05);
    out[step].q25 = quantile(agg, 0.25);
    out[step].q75 = quantile(agg, 0.75);
    out[step].q95 = quantile(agg, 0.95);
  }
  return out;
}

}  // namespace embr
