#include "embr/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace embr {

namespace {
void check_same(const Field2D& a, const Field2D& b, const char* who) {
  if (!a.same_shape(b))
    throw Error(ErrorKind::Numeric, std::string(who) + ": dimension mismatch");
}
}  // namespace

double mse(const Field2D& pred, const Field2D& truth) {
  check_same(pred, truth, "mse");
  double acc = 0.0;
  for (size_t n = 0; n < pred.size(); ++n) {
    const double d = pred[n] - truth[n];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

double ste(const Field2D& pred, const Field2D& truth) {
  check_same(pred, truth, "ste");
  double sp = 0.0, st = 0.0;
  for (size_t n = 0; n < pred.size(); ++n) {
    sp += pred[n];
    st += truth[n];
  }
  return std::fabs(sp - st);
}

double jsc(const Field2D& pred, const Field2D& truth, double threshold) {
  check_same(pred, truth, "jsc");
  size_t inter = 0, uni = 0;
  for (size_t n = 0; n < pred.size(); ++n) {
    const bool p = pred[n] > threshold;
    const bool t = truth[n] > threshold;
    inter += (p && t);
    uni += (p || t);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Field2D arrival_map(const std::vector<Field2D>& fronts, double threshold) {
  if (fronts.empty())
    throw Error(ErrorKind::Numeric, "arrival_map: empty series");
  Field2D out(fronts[0].rows(), fronts[0].cols(), -1.0);
  for (size_t t = 0; t < fronts.size(); ++t) {
    check_same(fronts[t], out, "arrival_map");
    for (size_t n = 0; n < out.size(); ++n)
      if (out[n] < 0.0 && fronts[t][n] > threshold)
        out[n] = static_cast<double>(t);
  }
  return out;
}

double shape_agreement_from_arrivals(const Field2D& pred_arrival,
                                     const Field2D& truth_arrival,
                                     int horizon) {
  check_same(pred_arrival, truth_arrival, "shape_agreement");
  const double w = static_cast<double>(horizon);
  double penalty = 0.0;
  size_t burned = 0;
  for (size_t n = 0; n < pred_arrival.size(); ++n) {
    const bool p = pred_arrival[n] >= 0.0;
    const bool t = truth_arrival[n] >= 0.0;
    if (!p && !t) continue;
    ++burned;
    if (p && t)
      penalty += std::min(std::fabs(pred_arrival[n] - truth_arrival[n]), w) / w;
    else
      penalty += 1.0;  // burned in only one series: full penalty
  }
  if (burned == 0) return 1.0;
  return 1.0 - penalty / static_cast<double>(burned);
}

double shape_agreement(const std::vector<Field2D>& pred_fronts,
                       const std::vector<Field2D>& truth_fronts,
                       double threshold, int horizon) {
  if (pred_fronts.size() != truth_fronts.size())
    throw Error(ErrorKind::Numeric, "shape_agreement: length mismatch");
  return shape_agreement_from_arrivals(arrival_map(pred_fronts, threshold),
                                       arrival_map(truth_fronts, threshold),
                                       horizon);
}

const char* target_name(Target t) {
  return t == Target::Front ? "front" : "scar";
}

std::vector<StepMetrics> evaluate_series(const std::vector<Field2D>& pred,
                                         const std::vector<Field2D>& truth,
                                         Target target, double threshold,
                                         int sa_horizon) {
  if (pred.size() != truth.size())
    throw Error(ErrorKind::Numeric, "evaluate_series: misaligned series");
  if (pred.empty()) return {};

  Field2D pred_arr(pred[0].rows(), pred[0].cols(), -1.0);
  Field2D truth_arr(pred[0].rows(), pred[0].cols(), -1.0);

  std::vector<StepMetrics> out;
  out.reserve(pred.size());
  for (size_t s = 0; s < pred.size(); ++s) {
    check_same(pred[s], truth[s], "evaluate_series");
    for (size_t n = 0; n < pred_arr.size(); ++n) {
      if (pred_arr[n] < 0.0 && pred[s][n] > threshold)
        pred_arr[n] = static_cast<double>(s);
      if (truth_arr[n] < 0.0 && truth[s][n] > threshold)
        truth_arr[n] = static_cast<double>(s);
    }
    StepMetrics m;
    m.step = static_cast<int>(s);
    m.target = target;
    m.mse = mse(pred[s], truth[s]);
    m.ste = ste(pred[s], truth[s]);
    m.jsc = jsc(pred[s], truth[s], threshold);
    m.sa = shape_agreement_from_arrivals(pred_arr, truth_arr, sa_horizon);
    out.push_back(m);
  }
  return out;
}

}  // namespace embr
