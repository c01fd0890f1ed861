#include "embr/rollout.hpp"

#include <algorithm>
#include <cstring>

namespace embr {

namespace {

int channel_index(const std::vector<std::string>& channels,
                  const std::string& name) {
  for (size_t c = 0; c < channels.size(); ++c)
    if (channels[c] == name) return static_cast<int>(c);
  throw Error(ErrorKind::BadFormat, "rollout: missing channel " + name);
}

class OraclePredictor : public Predictor {
 public:
  OraclePredictor(const FireSequence& seq, int t_start, bool extend)
      : seq_(seq), t_start_(t_start), extend_(extend) {}
  Field2D predict(const Tensor&, int step) override {
    const int t = t_start_ + step + 1;
    if (t >= seq_.steps()) {
      if (extend_)
        return Field2D(seq_.density.rows(), seq_.density.cols());
      throw Error(ErrorKind::Numeric,
                  "oracle: truth exhausted at step " + std::to_string(step));
    }
    return seq_.frames[t].front;
  }

 private:
  const FireSequence& seq_;
  int t_start_;
  bool extend_;
};

class ZeroPredictor : public Predictor {
 public:
  Field2D predict(const Tensor& window, int) override {
    return Field2D(window.dim(1), window.dim(2));
  }
};

class PersistencePredictor : public Predictor {
 public:
  explicit PersistencePredictor(ChannelNorm front) : front_(front) {}
  Field2D predict(const Tensor& window, int) override {
    const int t = window.dim(0) - 1;
    const int h = window.dim(1), w = window.dim(2);
    Field2D out(h, w);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        out.at(i, j) =
            denormalize_value(front_, window.at4(t, i, j, kFrontChannel));
    return out;
  }

 private:
  ChannelNorm front_;
};

class NeuralPredictor : public Predictor {
 public:
  NeuralPredictor(Model& model, ChannelNorm front)
      : model_(model), front_(front) {}
  Field2D predict(const Tensor& window, int) override {
    Field2D out = model_.predict(window);
    for (size_t n = 0; n < out.size(); ++n)
      out[n] = denormalize_value(front_, out[n]);
    return out;
  }

 private:
  Model& model_;
  ChannelNorm front_;
};

// Physical-unit window frame writer shared by the seed and the update.
void write_frame(Tensor& window, int slot,
                 const std::vector<std::string>& channels,
                 const Field2D& fuel, const Field2D& scar,
                 const Field2D& front, const Field2D& altitude,
                 const Field2D& moisture, double ux, double uy) {
  const int h = window.dim(1), w = window.dim(2);
  const int nc = static_cast<int>(channels.size());
  for (int c = 0; c < nc; ++c) {
    const std::string& name = channels[c];
    const Field2D* plane = nullptr;
    double constant = 0.0;
    bool is_const = false;
    if (name == "vegetation") plane = &fuel;
    else if (name == "scar") plane = &scar;
    else if (name == "front") plane = &front;
    else if (name == "terrain") plane = &altitude;
    else if (name == "moisture") plane = &moisture;
    else if (name == "wind_x") { is_const = true; constant = ux; }
    else if (name == "wind_y") { is_const = true; constant = uy; }
    else throw Error(ErrorKind::BadFormat, "unknown channel: " + name);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j)
        window.at4(slot, i, j, c) = is_const ? constant : plane->at(i, j);
  }
}

}  // namespace

FireSequence RolloutResult::as_sequence(const FireSequence& truth) const {
  FireSequence out;
  out.density = truth.density;
  out.altitude = truth.altitude;
  out.moisture = truth.moisture;
  out.wind = truth.wind;
  out.meta = truth.meta;
  out.meta.predicted = true;
  out.meta.burnout_step = static_cast<int>(fronts.size());
  out.meta.truncated = false;
  out.frames.resize(fronts.size());
  for (size_t i = 0; i < fronts.size(); ++i) {
    out.frames[i].front = fronts[i];
    out.frames[i].scar = scars[i];
    out.frames[i].fuel = fuels[i];
  }
  return out;
}

RolloutResult autoregress(Predictor& pred, const FireSequence& seq,
                          const NormStats& norm,
                          const std::vector<std::string>& channels,
                          int t_start, int steps, int window) {
  if (seq.steps() < 1)
    throw Error(ErrorKind::Numeric, "autoregress: empty sequence");
  if (t_start < 0 || t_start >= seq.steps())
    throw Error(ErrorKind::Numeric, "autoregress: t_start out of range");
  if (steps < 1 || window < 1)
    throw Error(ErrorKind::Usage, "autoregress: steps and window must be >= 1");
  channel_index(channels, "front");  // validates the channel contract

  const int rows = seq.density.rows(), cols = seq.density.cols();
  const int nc = static_cast<int>(channels.size());

  // seed the physical window; history before frame 0 replicates frame 0
  Tensor phys({window, rows, cols, nc});
  for (int s = 0; s < window; ++s) {
    const int f = std::max(0, t_start - (window - 1) + s);
    const FireFrame& fr = seq.frames[f];
    const auto [ux, uy] = seq.wind.wind_at(f);
    write_frame(phys, s, channels, fr.fuel, fr.scar, fr.front, seq.altitude,
                seq.moisture, ux, uy);
  }

  RolloutResult result;
  result.t_start = t_start;
  Field2D fuel = seq.frames[t_start].fuel;
  Field2D scar = seq.frames[t_start].scar;

  const Field2D zero_front(rows, cols);
  for (int i = 0; i < steps; ++i) {
    Tensor normalized = phys;
    normalize_window(normalized, norm, channels);
    Field2D front = pred.predict(normalized, i);
    if (front.rows() != rows || front.cols() != cols)
      throw Error(ErrorKind::Numeric,
                  "autoregress: bad prediction shape at step " +
                      std::to_string(i));
    if (!front.all_finite())
      throw Error(ErrorKind::NonFiniteValue,
                  "autoregress: non-finite prediction at step " +
                      std::to_string(i));

    for (size_t n = 0; n < fuel.size(); ++n) {
      fuel[n] = std::max(0.0, fuel[n] - front[n]);
      scar[n] += front[n];
    }

    // slide the window and append the new frame
    const size_t frame_sz = static_cast<size_t>(rows) * cols * nc;
    std::memmove(phys.data(), phys.data() + frame_sz,
                 frame_sz * (window - 1) * sizeof(double));
    const auto [ux, uy] = seq.wind.wind_at(t_start + i + 1);
    write_frame(phys, window - 1, channels, fuel, scar, front, seq.altitude,
                seq.moisture, ux, uy);

    result.fronts.push_back(front);
    result.scars.push_back(scar);
    result.fuels.push_back(fuel);

    const int t = t_start + i + 1;
    if (t < seq.steps()) {
      result.truth_fronts.push_back(seq.frames[t].front);
      result.truth_scars.push_back(seq.frames[t].scar);
    } else {
      result.truth_fronts.push_back(zero_front);
      result.truth_scars.push_back(seq.frames.back().scar);
    }
  }
  return result;
}

std::unique_ptr<Predictor> oracle_predictor(const FireSequence& seq,
                                            int t_start, bool extend) {
  return std::make_unique<OraclePredictor>(seq, t_start, extend);
}

std::unique_ptr<Predictor> zero_predictor() {
  return std::make_unique<ZeroPredictor>();
}

std::unique_ptr<Predictor> persistence_predictor(const NormStats& norm) {
  return std::make_unique<PersistencePredictor>(norm.at("front"));
}

std::unique_ptr<Predictor> neural_predictor(Model& model,
                                            const NormStats& norm) {
  return std::make_unique<NeuralPredictor>(model, norm.at("front"));
}

}  // namespace embr
