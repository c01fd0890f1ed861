#pragma once

#include <memory>
#include <string>
#include <vector>

#include "embr/dataset.hpp"
#include "embr/tensor.hpp"

namespace embr {

// ---- differentiable kernels (same padding, stride 1) ----

// x (H, W, Cin) * w (K, K, Cin, Cout) + b (Cout) -> y (H, W, Cout).
// Cross-correlation in the deep-learning convention.
void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    Tensor& y);

// Accumulates into gw and gb; writes gx (overwrite) when non-null.
void conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& gy,
                     Tensor* gx, Tensor& gw, Tensor& gb);

void relu_forward(const Tensor& x, Tensor& y);
void relu_backward(const Tensor& x, const Tensor& gy, Tensor& gx);

// ---- ConvLSTM cell ----

// Gate parameters of one ConvLSTM block. Gate order in the 4F axis is
// input, forget, candidate, output.
struct ConvLstmParams {
  Tensor wx;  // (K, K, Cin, 4F)
  Tensor wh;  // (K, K, F, 4F)
  Tensor b;   // (4F)
};

struct ConvLstmCache {
  Tensor z;  // preactivations (H, W, 4F)
  Tensor c;  // cell state after this step
  Tensor h;  // hidden state after this step
};

// One time step: z = conv(x, wx) + conv(h_prev, wh) + b, then the usual
// gate algebra. Returns cache needed for backprop through time.
void convlstm_cell_forward(const ConvLstmParams& p, const Tensor& x,
                           const Tensor& h_prev, const Tensor& c_prev,
                           ConvLstmCache& cache);

// ---- models ----

class Model {
 public:
  virtual ~Model() = default;

  // Inference: window is (T, H, W, C) in normalized units; output is the
  // normalized next-step front. CNN variants use only the last frame.
  virtual Field2D predict(const Tensor& window) = 0;

  // MSE loss against a normalized label; fills gradients (overwrites).
  virtual double loss_grads(const Tensor& window, const Field2D& label) = 0;

  virtual std::vector<Tensor*> parameters() = 0;
  virtual std::vector<Tensor*> gradients() = 0;
  virtual std::string arch_json() const = 0;
  virtual bool single_frame() const = 0;
};

struct CnnSpec {
  int in_channels = 5;
  int kernel = 5;
  std::vector<int> filters = {32, 64, 128};
  double clip = 0.0;  // 0.025 for the thresholded variant, 0 disables
};

struct ConvLstmSpec {
  int in_channels = 5;
  int kernel = 5;
  int blocks = 10;   // nb
  int filters = 20;  // fpb
  int window = 10;   // T, baked into the time-collapse layer
};

std::unique_ptr<Model> build_cnn(const CnnSpec& spec, uint64_t seed);
std::unique_ptr<Model> build_convlstm(const ConvLstmSpec& spec, uint64_t seed);
std::unique_ptr<Model> model_from_arch(const std::string& arch, uint64_t seed);

// ---- optimizer & training ----

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const std::vector<Tensor*>& params, AdamConfig cfg);
  void step(const std::vector<Tensor*>& params,
            const std::vector<Tensor*>& grads);

 private:
  AdamConfig cfg_;
  std::vector<Tensor> m_, v_;
  int t_ = 0;
};

struct TrainConfig {
  int epochs = 1;
  AdamConfig adam;
  uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean instance loss per epoch
};

// Single-threaded, deterministic given the seed (fixed shuffle order).
// Instances must already be normalized. Aborts on non-finite loss.
TrainResult train(Model& model, const std::vector<TrainingInstance>& data,
                  const TrainConfig& cfg);

// ---- checkpoints ----
// "EMBRMDL1" magic, uint32 LE length, arch JSON, float64 LE parameter blob
// in parameters() order, each tensor row-major.
void save_model(const std::string& path, Model& model);
std::unique_ptr<Model> load_model(const std::string& path);

}  // namespace embr
