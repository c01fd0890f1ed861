#include "embr/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "embr/rng.hpp"

namespace embr {

using nlohmann::json;

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Tensor init_weights(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor w(std::move(shape));
  const double s = std::sqrt(1.0 / fan_in);
  for (size_t n = 0; n < w.size(); ++n) w[n] = rng.uniform(-s, s);
  return w;
}

// Last time slice of a (T, H, W, C) window as (H, W, C).
Tensor slice_frame(const Tensor& window, int t) {
  if (window.rank() != 4)
    throw Error(ErrorKind::Numeric, "expected (T, H, W, C) window");
  const int h = window.dim(1), w = window.dim(2), c = window.dim(3);
  Tensor out({h, w, c});
  const size_t n = out.size();
  std::memcpy(out.data(), window.data() + static_cast<size_t>(t) * n,
              n * sizeof(double));
  return out;
}

Field2D to_field(const Tensor& y) {
  Field2D f(y.dim(0), y.dim(1));
  for (size_t n = 0; n < f.size(); ++n) f[n] = y[n];
  return f;
}

// dL/dy for L = mean squared error; returns the loss.
double mse_loss_grad(const Tensor& y, const Field2D& label, Tensor& gy) {
  if (y.dim(0) != label.rows() || y.dim(1) != label.cols() || y.dim(2) != 1)
    throw Error(ErrorKind::Numeric, "loss: output/label shape mismatch");
  if (!gy.same_shape(y)) gy = Tensor(y.shape());
  const double inv = 1.0 / static_cast<double>(label.size());
  double loss = 0.0;
  for (size_t n = 0; n < label.size(); ++n) {
    const double d = y[n] - label[n];
    loss += d * d;
    gy[n] = 2.0 * d * inv;
  }
  return loss * inv;
}

// ---- stacked-conv CNN ----

class CnnModel : public Model {
 public:
  CnnModel(CnnSpec spec, uint64_t seed) : spec_(std::move(spec)) {
    Rng rng(seed, 0xC44);
    int cin = spec_.in_channels;
    std::vector<int> outs = spec_.filters;
    outs.push_back(1);  // final single-filter convolution, no activation
    for (size_t i = 0; i < outs.size(); ++i) {
      Layer l;
      l.w = init_weights({spec_.kernel, spec_.kernel, cin, outs[i]},
                         spec_.kernel * spec_.kernel * cin, rng);
      l.b = Tensor({outs[i]}, 0.0);
      l.gw = Tensor(l.w.shape(), 0.0);
      l.gb = Tensor(l.b.shape(), 0.0);
      l.relu = i + 1 < outs.size();
      layers_.push_back(std::move(l));
      cin = outs[i];
    }
  }

  Field2D predict(const Tensor& window) override {
    Tensor a = slice_frame(window, window.dim(0) - 1);
    Tensor z, act;
    for (auto& l : layers_) {
      conv2d_forward(a, l.w, l.b, z);
      if (l.relu) {
        relu_forward(z, act);
        std::swap(a, act);
      } else {
        std::swap(a, z);
      }
    }
    Field2D out = to_field(a);
    if (spec_.clip > 0.0)
      for (size_t n = 0; n < out.size(); ++n)
        if (out[n] < spec_.clip) out[n] = 0.0;
    return out;
  }

  double loss_grads(const Tensor& window, const Field2D& label) override {
    for (auto& l : layers_) {
      l.gw.zero();
      l.gb.zero();
    }
    const Tensor x = slice_frame(window, window.dim(0) - 1);
    const size_t nl = layers_.size();
    pre_.resize(nl);
    act_.resize(nl);
    const Tensor* a = &x;
    for (size_t i = 0; i < nl; ++i) {
      conv2d_forward(*a, layers_[i].w, layers_[i].b, pre_[i]);
      if (layers_[i].relu)
        relu_forward(pre_[i], act_[i]);
      else
        act_[i] = pre_[i];
      a = &act_[i];
    }

    Tensor gy;
    const double loss = mse_loss_grad(act_[nl - 1], label, gy);
    Tensor ga = std::move(gy), gz;
    for (size_t i = nl; i-- > 0;) {
      if (layers_[i].relu) {
        relu_backward(pre_[i], ga, gz);
      } else {
        gz = std::move(ga);
      }
      const Tensor& input = i == 0 ? x : act_[i - 1];
      conv2d_backward(input, layers_[i].w, gz, i == 0 ? nullptr : &ga,
                      layers_[i].gw, layers_[i].gb);
    }
    return loss;
  }

  std::vector<Tensor*> parameters() override {
    std::vector<Tensor*> p;
    for (auto& l : layers_) {
      p.push_back(&l.w);
      p.push_back(&l.b);
    }
    return p;
  }
  std::vector<Tensor*> gradients() override {
    std::vector<Tensor*> g;
    for (auto& l : layers_) {
      g.push_back(&l.gw);
      g.push_back(&l.gb);
    }
    return g;
  }

  std::string arch_json() const override {
    json j = {{"type", "cnn"},
              {"in_channels", spec_.in_channels},
              {"kernel", spec_.kernel},
              {"filters", spec_.filters},
              {"clip", spec_.clip}};
    return j.dump();
  }
  bool single_frame() const override { return true; }

 private:
  struct Layer {
    Tensor w, b, gw, gb;
    bool relu = false;
  };
  CnnSpec spec_;
  std::vector<Layer> layers_;
  std::vector<Tensor> pre_, act_;
};

// ---- stacked ConvLSTM with a time-collapsing 1x1 convolution ----

class ConvLstmModel : public Model {
 public:
  ConvLstmModel(ConvLstmSpec spec, uint64_t seed) : spec_(std::move(spec)) {
    Rng rng(seed, 0x157);
    int cin = spec_.in_channels;
    const int k = spec_.kernel, f = spec_.filters;
    for (int bl = 0; bl < spec_.blocks; ++bl) {
      ConvLstmParams p;
      p.wx = init_weights({k, k, cin, 4 * f}, k * k * cin, rng);
      p.wh = init_weights({k, k, f, 4 * f}, k * k * f, rng);
      p.b = Tensor({4 * f}, 0.0);
      for (int u = 0; u < f; ++u) p.b[f + u] = 1.0;  // forget-gate bias
      blocks_.push_back(std::move(p));
      gblocks_.push_back({Tensor({k, k, cin, 4 * f}, 0.0),
                          Tensor({k, k, f, 4 * f}, 0.0),
                          Tensor({4 * f}, 0.0)});
      cin = f;
    }
    wc_ = init_weights({1, 1, spec_.window * f, 1}, spec_.window * f, rng);
    bc_ = Tensor({1}, 0.0);
    gwc_ = Tensor(wc_.shape(), 0.0);
    gbc_ = Tensor(bc_.shape(), 0.0);
  }

  Field2D predict(const Tensor& window) override {
    Tensor y = forward(window, /*keep_caches=*/false);
    return to_field(y);
  }

  double loss_grads(const Tensor& window, const Field2D& label) override {
    for (auto& g : gblocks_) {
      g.wx.zero();
      g.wh.zero();
      g.b.zero();
    }
    gwc_.zero();
    gbc_.zero();

    Tensor y = forward(window, /*keep_caches=*/true);
    Tensor gy;
    const double loss = mse_loss_grad(y, label, gy);
    backward(gy);
    return loss;
  }

  std::vector<Tensor*> parameters() override {
    std::vector<Tensor*> p;
    for (auto& b : blocks_) {
      p.push_back(&b.wx);
      p.push_back(&b.wh);
      p.push_back(&b.b);
    }
    p.push_back(&wc_);
    p.push_back(&bc_);
    return p;
  }
  std::vector<Tensor*> gradients() override {
    std::vector<Tensor*> g;
    for (auto& b : gblocks_) {
      g.push_back(&b.wx);
      g.push_back(&b.wh);
      g.push_back(&b.b);
    }
    g.push_back(&gwc_);
    g.push_back(&gbc_);
    return g;
  }

  std::string arch_json() const override {
    json j = {{"type", "convlstm"},
              {"in_channels", spec_.in_channels},
              {"kernel", spec_.kernel},
              {"blocks", spec_.blocks},
              {"filters", spec_.filters},
              {"window", spec_.window}};
    return j.dump();
  }
  bool single_frame() const override { return false; }

 private:
  Tensor forward(const Tensor& window, bool keep_caches) {
    if (window.rank() != 4 || window.dim(0) != spec_.window)
      throw Error(ErrorKind::Numeric,
                  "convlstm: window length does not match the model");
    const int t_len = spec_.window;
    const int h = window.dim(1), w = window.dim(2);
    const int f = spec_.filters;

    xs_.resize(t_len);
    for (int t = 0; t < t_len; ++t) xs_[t] = slice_frame(window, t);
    block_inputs_.clear();

    caches_.assign(spec_.blocks, std::vector<ConvLstmCache>(t_len));
    std::vector<Tensor>* input = &xs_;
    std::vector<Tensor> hs;
    for (int bl = 0; bl < spec_.blocks; ++bl) {
      Tensor h_prev({h, w, f}, 0.0), c_prev({h, w, f}, 0.0);
      for (int t = 0; t < t_len; ++t) {
        ConvLstmCache& cache = caches_[bl][t];
        convlstm_cell_forward(blocks_[bl], (*input)[t],
                              t == 0 ? h_prev : caches_[bl][t - 1].h,
                              t == 0 ? c_prev : caches_[bl][t - 1].c, cache);
      }
      hs.resize(t_len);
      for (int t = 0; t < t_len; ++t) hs[t] = caches_[bl][t].h;
      input = &hs;
      if (keep_caches && bl + 1 < spec_.blocks) block_inputs_.push_back(hs);
    }

    // time-collapse: stack hidden states over the channel axis
    stacked_ = Tensor({h, w, t_len * f});
    for (int t = 0; t < t_len; ++t)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
          for (int u = 0; u < f; ++u)
            stacked_.at3(i, j, t * f + u) = caches_[spec_.blocks - 1][t].h.at3(i, j, u);

    Tensor y;
    conv2d_forward(stacked_, wc_, bc_, y);
    if (!keep_caches) {
      caches_.clear();
      block_inputs_.clear();
      xs_.clear();
    }
    return y;
  }

  void backward(const Tensor& gy) {
    const int t_len = spec_.window;
    const int f = spec_.filters;
    const int h = stacked_.dim(0), w = stacked_.dim(1);

    Tensor gstacked;
    conv2d_backward(stacked_, wc_, gy, &gstacked, gwc_, gbc_);

    // split the collapse gradient into per-step hidden gradients
    std::vector<Tensor> gh(t_len, Tensor({h, w, f}, 0.0));
    for (int t = 0; t < t_len; ++t)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
          for (int u = 0; u < f; ++u)
            gh[t].at3(i, j, u) = gstacked.at3(i, j, t * f + u);

    Tensor gb_scratch, gx, gh_prev;
    for (int bl = spec_.blocks - 1; bl >= 0; --bl) {
      const std::vector<Tensor>& inputs =
          bl == 0 ? xs_ : block_inputs_[bl - 1];
      std::vector<Tensor> gh_below;
      if (bl > 0) gh_below.assign(t_len, Tensor({h, w, f}, 0.0));

      Tensor gc({h, w, f}, 0.0);
      Tensor gz({h, w, 4 * f});
      const Tensor zero_state({h, w, f}, 0.0);
      gb_scratch = Tensor({4 * f}, 0.0);
      for (int t = t_len - 1; t >= 0; --t) {
        const ConvLstmCache& cache = caches_[bl][t];
        const Tensor& c_prev = t == 0 ? zero_state : caches_[bl][t - 1].c;
        const Tensor& h_prev = t == 0 ? zero_state : caches_[bl][t - 1].h;

        const size_t pixels = static_cast<size_t>(h) * w;
        const double* zd = cache.z.data();
        const double* cd = cache.c.data();
        const double* cpd = c_prev.data();
        const double* ghd = gh[t].data();
        double* gzd = gz.data();
        double* gcd = gc.data();
        for (size_t px = 0; px < pixels; ++px) {
          const double* z = zd + px * 4 * f;
          double* gzp = gzd + px * 4 * f;
          for (int u = 0; u < f; ++u) {
            const double gi = sigmoid(z[u]);
            const double gf = sigmoid(z[f + u]);
            const double gg = std::tanh(z[2 * f + u]);
            const double go = sigmoid(z[3 * f + u]);
            const double tc = std::tanh(cd[px * f + u]);
            const double dh = ghd[px * f + u];
            const double dc = dh * go * (1.0 - tc * tc) + gcd[px * f + u];
            gzp[u] = dc * gg * gi * (1.0 - gi);
            gzp[f + u] = dc * cpd[px * f + u] * gf * (1.0 - gf);
            gzp[2 * f + u] = dc * gi * (1.0 - gg * gg);
            gzp[3 * f + u] = dh * tc * go * (1.0 - go);
            gcd[px * f + u] = dc * gf;
          }
        }

        conv2d_backward(inputs[t], blocks_[bl].wx, gz,
                        bl == 0 ? nullptr : &gx, gblocks_[bl].wx,
                        gblocks_[bl].b);
        if (bl > 0)
          for (size_t n = 0; n < gx.size(); ++n) gh_below[t][n] += gx[n];

        gb_scratch.zero();
        conv2d_backward(h_prev, blocks_[bl].wh, gz, t == 0 ? nullptr : &gh_prev,
                        gblocks_[bl].wh, gb_scratch);
        if (t > 0)
          for (size_t n = 0; n < gh_prev.size(); ++n)
            gh[t - 1][n] += gh_prev[n];
      }
      if (bl > 0) gh = std::move(gh_below);
    }
    block_inputs_.clear();
    caches_.clear();
    xs_.clear();
  }

  ConvLstmSpec spec_;
  std::vector<ConvLstmParams> blocks_;
  std::vector<ConvLstmParams> gblocks_;
  Tensor wc_, bc_, gwc_, gbc_;

  // forward caches for backprop
  std::vector<Tensor> xs_;
  std::vector<std::vector<Tensor>> block_inputs_;
  std::vector<std::vector<ConvLstmCache>> caches_;
  Tensor stacked_;
};

}  // namespace

std::unique_ptr<Model> build_cnn(const CnnSpec& spec, uint64_t seed) {
  return std::make_unique<CnnModel>(spec, seed);
}

std::unique_ptr<Model> build_convlstm(const ConvLstmSpec& spec,
                                      uint64_t seed) {
  return std::make_unique<ConvLstmModel>(spec, seed);
}

std::unique_ptr<Model> model_from_arch(const std::string& arch,
                                       uint64_t seed) {
  json j;
  try {
    j = json::parse(arch);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadFormat, std::string("bad arch json: ") + e.what());
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "cnn") {
    CnnSpec s;
    s.in_channels = j.at("in_channels").get<int>();
    s.kernel = j.at("kernel").get<int>();
    s.filters = j.at("filters").get<std::vector<int>>();
    s.clip = j.at("clip").get<double>();
    return build_cnn(s, seed);
  }
  if (type == "convlstm") {
    ConvLstmSpec s;
    s.in_channels = j.at("in_channels").get<int>();
    s.kernel = j.at("kernel").get<int>();
    s.blocks = j.at("blocks").get<int>();
    s.filters = j.at("filters").get<int>();
    s.window = j.at("window").get<int>();
    return build_convlstm(s, seed);
  }
  throw Error(ErrorKind::BadFormat, "unknown model type: " + type);
}

// ---- Adam ----

Adam::Adam(const std::vector<Tensor*>& params, AdamConfig cfg) : cfg_(cfg) {
  for (const Tensor* p : params) {
    m_.emplace_back(p->shape(), 0.0);
    v_.emplace_back(p->shape(), 0.0);
  }
}

void Adam::step(const std::vector<Tensor*>& params,
                const std::vector<Tensor*>& grads) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw Error(ErrorKind::Numeric, "Adam: parameter list mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (size_t n = 0; n < p.size(); ++n) {
      m[n] = cfg_.beta1 * m[n] + (1.0 - cfg_.beta1) * g[n];
      v[n] = cfg_.beta2 * v[n] + (1.0 - cfg_.beta2) * g[n] * g[n];
      const double mhat = m[n] / bc1;
      const double vhat = v[n] / bc2;
      p[n] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

TrainResult train(Model& model, const std::vector<TrainingInstance>& data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw Error(ErrorKind::Usage, "train: empty dataset");
  Adam adam(model.parameters(), cfg.adam);
  const auto params = model.parameters();
  const auto grads = model.gradients();

  TrainResult result;
  std::vector<size_t> order(data.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(cfg.seed, 0xE90C + static_cast<uint64_t>(epoch));
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);

    double sum = 0.0;
    for (size_t i : order) {
      const double loss = model.loss_grads(data[i].window, data[i].label);
      if (!std::isfinite(loss))
        throw Error(ErrorKind::Numeric,
                    "train: non-finite loss at epoch " + std::to_string(epoch));
      adam.step(params, grads);
      sum += loss;
    }
    result.epoch_loss.push_back(sum / static_cast<double>(data.size()));
  }
  return result;
}

// ---- checkpoints ----

namespace {
constexpr char kModelMagic[8] = {'E', 'M', 'B', 'R', 'M', 'D', 'L', '1'};
}

void save_model(const std::string& path, Model& model) {
  const std::string arch = model.arch_json();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  os.write(kModelMagic, 8);
  const uint32_t len = static_cast<uint32_t>(arch.size());
  unsigned char b[4] = {static_cast<unsigned char>(len),
                        static_cast<unsigned char>(len >> 8),
                        static_cast<unsigned char>(len >> 16),
                        static_cast<unsigned char>(len >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
  os.write(arch.data(), arch.size());
  for (Tensor* p : model.parameters())
    os.write(reinterpret_cast<const char*>(p->data()),
             p->size() * sizeof(double));
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

std::unique_ptr<Model> load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kModelMagic, 8) != 0)
    throw Error(ErrorKind::BadMagic, "bad magic: " + path);
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw Error(ErrorKind::TruncatedPayload, "truncated header: " + path);
  const uint32_t len = uint32_t(b[0]) | (uint32_t(b[1]) << 8) |
                       (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
  std::string arch(len, '\0');
  is.read(arch.data(), len);
  if (!is) throw Error(ErrorKind::TruncatedPayload, "truncated header: " + path);

  auto model = model_from_arch(arch, 0);
  for (Tensor* p : model->parameters()) {
    is.read(reinterpret_cast<char*>(p->data()), p->size() * sizeof(double));
    if (!is)
      throw Error(ErrorKind::TruncatedPayload, "truncated payload: " + path);
    if (!p->all_finite())
      throw Error(ErrorKind::NonFiniteValue, "non-finite parameters: " + path);
  }
  return model;
}

}  // namespace embr
