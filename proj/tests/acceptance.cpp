// Acceptance gate: one criterion per command-line argument (A1..A14), all of
// them when run without arguments. Prints one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "embr/bootstrap.hpp"
#include "embr/dataset.hpp"
#include "embr/metrics.hpp"
#include "embr/neural.hpp"
#include "embr/rng.hpp"
#include "embr/rollout.hpp"
#include "embr/sim.hpp"
#include "embr/worldgen.hpp"

using namespace embr;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool ok = true;
  std::ostringstream note;

  void require(bool cond, const std::string& why) {
    if (!cond) {
      ok = false;
      if (note.tellp() > 0) note << "; ";
      note << why;
    }
  }
  void info(const std::string& what) {
    if (note.tellp() > 0) note << "; ";
    note << what;
  }
};

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("embr_accept_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------- A1 ----------
void a1(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Kernel k = build_kernel(3);
  const double ms = elapsed_ms(t0);

  int oracle = 0;
  for (int dx = -3; dx <= 3; ++dx)
    for (int dy = -3; dy <= 3; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (dx * dx + dy * dy <= 9) ++oracle;
    }
  c.require(oracle == 28, "brute-force oracle did not count 28 offsets");
  c.require(static_cast<int>(k.offsets.size()) == 28,
            "kernel has " + std::to_string(k.offsets.size()) + " offsets");
  for (const auto& [dx, dy] : k.offsets)
    c.require(dx * dx + dy * dy <= 9 && !(dx == 0 && dy == 0),
              "offset outside the radius-3 disc");
  c.require(ms < 1.0, "build took " + std::to_string(ms) + " ms");
}

// ---------- A2 ----------
void a2(Criterion& c) {
  Rng rng(2026, 2);
  double worst_gamma = 0.0, worst_theta0 = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double ux = rng.uniform(-12.0, 12.0);
    const double uy = rng.uniform(-12.0, 12.0);
    const WindEllipse e = wind_ellipse(ux, uy, 1.0);
    for (int s = 0; s < 8; ++s) {
      const double theta = rng.uniform(0.0, 2 * M_PI);
      const double st = std::sin(theta), ct = std::cos(theta);
      const double gamma =
          std::sqrt(e.a * e.a * st * st - e.a * e.a * e.eps * e.eps * st * st +
                    e.b * e.b * ct * ct);
      worst_gamma = std::max(worst_gamma, std::fabs(gamma - e.b));
    }
    const double speed = std::sqrt(ux * ux + uy * uy);
    if (speed > 1e-9) {
      const double psi0 = wind_factor(e, ux, uy, 2.0);  // downwind direction
      worst_theta0 = std::max(worst_theta0, std::fabs(psi0 - (1.0 + 2.0 * speed)));
    }
  }
  c.require(worst_gamma < 1e-12,
            "gamma identity off by " + std::to_string(worst_gamma));
  c.require(worst_theta0 < 1e-9,
            "downwind factor off by " + std::to_string(worst_theta0));
}

// ---------- A3 ----------
// the 8 symmetries of the square lattice, as index maps on an n x n field
std::pair<int, int> sym_map(int s, int i, int j, int n) {
  const int m = n - 1;
  switch (s) {
    case 0: return {i, j};
    case 1: return {j, m - i};          // rot 90
    case 2: return {m - i, m - j};      // rot 180
    case 3: return {m - j, i};          // rot 270
    case 4: return {m - i, j};          // flip rows
    case 5: return {i, m - j};          // flip cols
    case 6: return {j, i};              // transpose
    default: return {m - j, m - i};     // anti-transpose
  }
}

Field2D sym_field(int s, const Field2D& f) {
  const int n = f.rows();
  Field2D out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto [oi, oj] = sym_map(s, i, j, n);
      out.at(oi, oj) = f.at(i, j);
    }
  return out;
}

void a3(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  SimParams p;
  p.n_w = 40;
  p.n_h = 40;
  const Field2D density(40, 40, 1.0), zero(40, 40, 0.0);
  const Kernel kernel = build_kernel(p.n_r);
  const int ci = 13, cj = 22;  // deliberately off-center

  SimState base = make_sim_state(density, zero, zero, p);
  ignite_spot(base, ci, cj, 3);

  for (int s = 1; s < 8 && c.ok; ++s) {
    SimState ref = base;  // evolves in the original frame
    SimState alt = make_sim_state(density, zero, zero, p);
    const auto [si, sj] = sym_map(s, ci, cj, 40);
    ignite_spot(alt, si, sj, 3);

    for (int t = 0; t < 30 && c.ok; ++t) {
      step(ref, p, kernel, 0.0, 0.0);
      step(alt, p, kernel, 0.0, 0.0);
      const bool same = sym_field(s, ref.q) == alt.q &&
                        sym_field(s, ref.burning) == alt.burning &&
                        sym_field(s, ref.t_ign) == alt.t_ign &&
                        sym_field(s, ref.fuel) == alt.fuel &&
                        sym_field(s, ref.scar) == alt.scar;
      c.require(same, "symmetry " + std::to_string(s) + " broke at step " +
                          std::to_string(t));
    }
  }
  const double ms = elapsed_ms(t0);
  c.require(ms < 1000.0, "took " + std::to_string(ms) + " ms");
}

// ---------- A4 ----------
void a4(Criterion& c) {
  SimParams p;
  const ScenarioSpec base = corpus_spec("complex", 0);
  for (int s = 0; s < 20 && c.ok; ++s) {
    ScenarioSpec spec = base;
    p.n_w = p.n_h = spec.full();
    Rng rng(4000, static_cast<uint64_t>(s));
    Scenario sc = make_scenario(spec, rng, p);
    const Field2D density = sc.state.density;
    const FireSequence seq = simulate(std::move(sc.state), p, sc.wind);

    const Field2D* prev_scar = nullptr;
    for (int t = 0; t < seq.steps() && c.ok; ++t) {
      const FireFrame& fr = seq.frames[t];
      for (size_t n = 0; n < density.size(); ++n) {
        if (std::fabs(fr.fuel[n] + fr.scar[n] - density[n]) > 1e-9) {
          c.require(false, "seed " + std::to_string(s) +
                               ": conservation broken at step " +
                               std::to_string(t));
          break;
        }
        if (prev_scar && fr.scar[n] < (*prev_scar)[n] - 0.0) {
          c.require(false, "seed " + std::to_string(s) +
                               ": scar decreased at step " + std::to_string(t));
          break;
        }
      }
      prev_scar = &fr.scar;
    }
  }
}

// ---------- A5 ----------
void a5(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  SimParams p;
  std::vector<int> burnout;
  int terminated = 0;
  const int n = 50;
  for (int s = 0; s < n; ++s) {
    ScenarioSpec spec = corpus_spec("wind", 0);
    p.n_w = p.n_h = spec.full();
    Rng rng(5000, static_cast<uint64_t>(s));
    Scenario sc = make_scenario(spec, rng, p);
    const FireSequence seq = simulate(std::move(sc.state), p, sc.wind);
    burnout.push_back(seq.meta.burnout_step);
    terminated += !seq.meta.truncated;
  }
  std::sort(burnout.begin(), burnout.end());
  const double median =
      (burnout[n / 2 - 1] + burnout[n / 2]) / 2.0;
  const double frac = terminated / static_cast<double>(n);
  c.info("median burnout " + std::to_string(median) + ", terminated " +
         std::to_string(100.0 * frac) + "%");
  c.require(median >= 60.0 && median <= 250.0, "median outside [60, 250]");
  c.require(frac >= 0.8, "fewer than 80% terminate before the cap");
  c.require(elapsed_ms(t0) < 120000.0, "over the 2 min budget");
}

// ---------- A6 ----------
// scar extent from the spot center along +/- the first (east) axis
std::pair<int, int> extents(const Field2D& scar, int ci, int cj) {
  int fwd = 0, bwd = 0;
  for (int i = 0; i < scar.rows(); ++i)
    for (int j = 0; j < scar.cols(); ++j)
      if (scar.at(i, j) > 0.0) {
        fwd = std::max(fwd, i - ci);
        bwd = std::max(bwd, ci - i);
      }
  (void)cj;
  return {fwd, bwd};
}

void a6(Criterion& c) {
  // arena wide enough that neither lobe reaches the fuel boundary by step 30
  const int n = 240, ctr = n / 2;
  SimParams p;
  p.n_w = p.n_h = n;
  const Kernel kernel = build_kernel(p.n_r);

  int wind_wins = 0, slope_wins = 0;
  for (int s = 0; s < 20; ++s) {
    Rng rng(6000, static_cast<uint64_t>(s));
    const Field2D fuel = zero_pad(gen_uniform_fuel(rng, n - 10), 5);
    const Field2D zero(n, n, 0.0);

    // downwind vs upwind under wind (7, 0)
    {
      SimState st = make_sim_state(fuel, zero, zero, p);
      ignite_spot(st, ctr, ctr, 3);
      for (int t = 0; t < 30; ++t) step(st, p, kernel, 7.0, 0.0);
      const auto [down, up] = extents(st.scar, ctr, ctr);
      wind_wins += down > up;
    }
    // uphill vs downhill under a grade-pi/6 plane rising east, no wind
    {
      Field2D terrain(n, n);
      const double t30 = std::tan(M_PI / 6.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) terrain.at(i, j) = t30 * i * p.delta;
      SimState st = make_sim_state(fuel, zero, terrain, p);
      ignite_spot(st, ctr, ctr, 3);
      for (int t = 0; t < 30; ++t) step(st, p, kernel, 0.0, 0.0);
      const auto [uphill, downhill] = extents(st.scar, ctr, ctr);
      slope_wins += uphill > downhill;
    }
  }
  c.info("downwind wins " + std::to_string(wind_wins) + "/20, uphill wins " +
         std::to_string(slope_wins) + "/20");
  c.require(wind_wins >= 19, "downwind bias below 95%");
  c.require(slope_wins >= 19, "uphill bias below 95%");
}

// ---------- A7 ----------
struct GradCheck {
  double worst_rel = 0.0;
  int checked = 0;

  void compare(double analytic, double numeric) {
    const double denom = std::max(std::fabs(analytic), std::fabs(numeric));
    if (denom < 1e-7) return;  // absolute fallback: both ~ zero
    worst_rel = std::max(worst_rel, std::fabs(analytic - numeric) / denom);
    ++checked;
  }
};

void fill_uniform(Tensor& t, Rng& rng, double scale = 0.5) {
  for (size_t n = 0; n < t.size(); ++n) t[n] = rng.uniform(-scale, scale);
}

void check_model(Model& model, const Tensor& window, const Field2D& label,
                 int stride, GradCheck& gc) {
  model.loss_grads(window, label);
  std::vector<std::vector<double>> analytic;
  for (Tensor* g : model.gradients())
    analytic.emplace_back(g->data(), g->data() + g->size());
  const double h = 1e-5;
  const auto params = model.parameters();
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p];
    for (size_t n = 0; n < w.size(); n += stride) {
      const double keep = w[n];
      w[n] = keep + h;
      const double lp = model.loss_grads(window, label);
      w[n] = keep - h;
      const double lm = model.loss_grads(window, label);
      w[n] = keep;
      gc.compare(analytic[p][n], (lp - lm) / (2 * h));
    }
  }
}

void a7(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(7000, 0);
  GradCheck gc;

  // conv2d against sum(y * r)
  {
    Tensor x({4, 4, 2}), w({3, 3, 2, 3}), b({3}), r({4, 4, 3});
    fill_uniform(x, rng);
    fill_uniform(w, rng);
    fill_uniform(b, rng);
    fill_uniform(r, rng);
    Tensor y, gx, gw(w.shape()), gb(b.shape());
    conv2d_forward(x, w, b, y);
    conv2d_backward(x, w, r, &gx, gw, gb);
    const double h = 1e-5;
    auto loss = [&]() {
      Tensor yy;
      conv2d_forward(x, w, b, yy);
      double acc = 0.0;
      for (size_t n = 0; n < yy.size(); ++n) acc += yy[n] * r[n];
      return acc;
    };
    auto probe = [&](Tensor& t, const Tensor& g, size_t n) {
      const double keep = t[n];
      t[n] = keep + h;
      const double lp = loss();
      t[n] = keep - h;
      const double lm = loss();
      t[n] = keep;
      gc.compare(g[n], (lp - lm) / (2 * h));
    };
    for (size_t n = 0; n < x.size(); n += 2) probe(x, gx, n);
    for (size_t n = 0; n < w.size(); n += 3) probe(w, gw, n);
    for (size_t n = 0; n < b.size(); ++n) probe(b, gb, n);
  }

  // ReLU via a 1-block CNN (conv + relu + conv)
  {
    CnnSpec spec;
    spec.in_channels = 2;
    spec.kernel = 3;
    spec.filters = {3};
    auto model = build_cnn(spec, 71);
    Tensor window({1, 4, 4, 2});
    fill_uniform(window, rng);
    Field2D label(4, 4);
    for (size_t n = 0; n < label.size(); ++n) label[n] = rng.uniform();
    check_model(*model, window, label, 1, gc);
  }

  // ConvLSTM cell unrolled 3 steps + time-collapse layer
  {
    ConvLstmSpec spec;
    spec.in_channels = 2;
    spec.kernel = 3;
    spec.blocks = 1;
    spec.filters = 2;
    spec.window = 3;
    auto model = build_convlstm(spec, 73);
    Tensor window({3, 3, 3, 2});
    fill_uniform(window, rng);
    Field2D label(3, 3);
    for (size_t n = 0; n < label.size(); ++n) label[n] = rng.uniform();
    check_model(*model, window, label, 1, gc);
  }

  // full desk-scale models
  {
    CnnSpec spec;
    spec.in_channels = 5;
    spec.kernel = 3;
    spec.filters = {4, 8};
    auto model = build_cnn(spec, 75);
    Tensor window({1, 6, 6, 5});
    fill_uniform(window, rng);
    Field2D label(6, 6);
    for (size_t n = 0; n < label.size(); ++n) label[n] = rng.uniform();
    check_model(*model, window, label, 7, gc);
  }
  {
    ConvLstmSpec spec;
    spec.in_channels = 5;
    spec.kernel = 3;
    spec.blocks = 2;
    spec.filters = 4;
    spec.window = 10;
    auto model = build_convlstm(spec, 77);
    Tensor window({10, 5, 5, 5});
    fill_uniform(window, rng);
    Field2D label(5, 5);
    for (size_t n = 0; n < label.size(); ++n) label[n] = rng.uniform();
    check_model(*model, window, label, 23, gc);
  }

  c.info("max relative error " + std::to_string(gc.worst_rel) + " over " +
         std::to_string(gc.checked) + " probes");
  c.require(gc.worst_rel < 1e-4, "gradient mismatch");
  const double ms = elapsed_ms(t0);
  c.require(ms < 60000.0, "took " + std::to_string(ms) + " ms");
}

// ---------- fixtures shared by A8 / A14 ----------
Manifest desk_corpus(const std::string& name, const std::string& corpus, int n,
                     uint64_t seed) {
  CorpusConfig cfg;
  cfg.corpus = corpus;
  cfg.n = n;
  cfg.seed = seed;
  cfg.inner = 22;  // 32x32 fields at the desk scale
  cfg.border = 5;
  cfg.jobs = 4;
  cfg.out_dir = work_dir(name).string();
  return build_corpus(cfg);
}

std::vector<TrainingInstance> make_instances(const Manifest& m,
                                             const std::string& split,
                                             int window, int stride) {
  std::vector<TrainingInstance> out;
  for (const auto& e : m.split_entries(split)) {
    const FireSequence seq = read_sequence(m.resolve(e));
    for (int t0 = 0; t0 < seq.steps() - 1; t0 += stride) {
      TrainingInstance inst = window_instance(seq, t0, window, m.channels);
      normalize_instance(inst, m.norm, m.channels);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

// mean loss over the fixture before any update
double initial_loss(Model& model, const std::vector<TrainingInstance>& data) {
  double acc = 0.0;
  for (const auto& inst : data) acc += model.loss_grads(inst.window, inst.label);
  return acc / data.size();
}

// ---------- A8 ----------
void a8(Criterion& c) {
  const Manifest m = desk_corpus("a8", "wind", 5, 808);  // 4 train sequences

  // CNN-Simplified, 2 blocks [4, 8]
  {
    const auto data = make_instances(m, "train", 1, 1);
    CnnSpec spec;
    spec.in_channels = 5;
    spec.kernel = 3;
    spec.filters = {4, 8};
    auto model = build_cnn(spec, 81);
    const double init = initial_loss(*model, data);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.adam.lr = 3e-3;
    cfg.seed = 81;
    const TrainResult r = train(*model, data, cfg);
    c.info("cnn loss " + std::to_string(init) + " -> " +
           std::to_string(r.epoch_loss.back()));
    c.require(r.epoch_loss.back() < 0.1 * init, "CNN loss did not drop 90%");

    // determinism given the seed
    auto again = build_cnn(spec, 81);
    const TrainResult r2 = train(*again, data, cfg);
    c.require(r2.epoch_loss == r.epoch_loss, "CNN training not deterministic");
  }

  // ConvLSTM, nb=2, fpb=4
  {
    const auto data = make_instances(m, "train", 10, 4);
    ConvLstmSpec spec;
    spec.in_channels = 5;
    spec.kernel = 3;
    spec.blocks = 2;
    spec.filters = 4;
    spec.window = 10;
    auto model = build_convlstm(spec, 83);
    const double init = initial_loss(*model, data);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.adam.lr = 1e-3;
    cfg.seed = 83;
    const TrainResult r = train(*model, data, cfg);
    c.info("convlstm loss " + std::to_string(init) + " -> " +
           std::to_string(r.epoch_loss.back()));
    c.require(r.epoch_loss.back() < 0.1 * init,
              "ConvLSTM loss did not drop 90%");
  }
}

// ---------- A9 ----------
void a9(Criterion& c) {
  SimParams p;
  ScenarioSpec spec = corpus_spec("wind", 0);
  p.n_w = p.n_h = spec.full();
  Rng rng(9000, 0);
  Scenario sc = make_scenario(spec, rng, p);
  const FireSequence seq = simulate(std::move(sc.state), p, sc.wind);

  NormStats norm;
  ChannelNorm unit;
  unit.min = 0.0;
  unit.max = 1.0;
  for (const char* name : {"vegetation", "scar", "front"})
    norm.channels[name] = unit;
  ChannelNorm wind;
  wind.standardized = true;
  norm.channels["wind_x"] = wind;
  norm.channels["wind_y"] = wind;

  auto oracle = oracle_predictor(seq, 0, true);
  const RolloutResult r =
      autoregress(*oracle, seq, norm, corpus_channels("wind"), 0, 50, 10);
  const auto front = evaluate_series(r.fronts, r.truth_fronts, Target::Front);
  const auto scar = evaluate_series(r.scars, r.truth_scars, Target::Scar);
  c.require(front.size() == 50 && scar.size() == 50, "missing steps");
  for (const auto& series : {front, scar})
    for (const auto& msr : series) {
      c.require(msr.mse == 0.0 && msr.ste == 0.0, "nonzero error at step " +
                                                      std::to_string(msr.step));
      c.require(msr.jsc == 1.0 && msr.sa == 1.0,
                "imperfect agreement at step " + std::to_string(msr.step));
      if (!c.ok) return;
    }
}

// ---------- A10 ----------
void a10(Criterion& c) {
  Rng rng(10000, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Field2D p(6, 6), t(6, 6);
    for (size_t n = 0; n < p.size(); ++n) {
      p[n] = rng.uniform(0.0, 0.3);
      t[n] = rng.uniform(0.0, 0.3);
    }
    double se = 0.0, sp = 0.0, st_ = 0.0;
    int inter = 0, uni = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        const double d = p.at(i, j) - t.at(i, j);
        se += d * d;
        sp += p.at(i, j);
        st_ += t.at(i, j);
        const bool bp = p.at(i, j) > 0.1, bt = t.at(i, j) > 0.1;
        inter += bp && bt;
        uni += bp || bt;
      }
    worst = std::max(worst, std::fabs(mse(p, t) - se / 36.0));
    worst = std::max(worst, std::fabs(ste(p, t) - std::fabs(sp - st_)));
    const double jref = uni == 0 ? 1.0 : double(inter) / uni;
    worst = std::max(worst, std::fabs(jsc(p, t) - jref));
  }
  c.require(worst < 1e-12, "metric oracle gap " + std::to_string(worst));

  // threshold is strict at 0.1
  Field2D at(2, 2, 0.0), empty(2, 2, 0.0);
  at.at(0, 0) = 0.1;
  c.require(jsc(at, empty) == 1.0, "0.1 counted as fire");
  at.at(0, 0) = 0.1 + 1e-12;
  c.require(jsc(at, empty) == 0.0, "strictly above 0.1 not counted");

  // thresholded CNN emits nothing in (0, 0.025)
  CnnSpec spec;
  spec.in_channels = 3;
  spec.kernel = 3;
  spec.filters = {4};
  spec.clip = 0.025;
  auto model = build_cnn(spec, 105);
  int clipped = 0;
  for (int trial = 0; trial < 30; ++trial) {
    Tensor window({1, 6, 6, 3});
    fill_uniform(window, rng, 1.0);
    const Field2D out = model->predict(window);
    for (size_t n = 0; n < out.size(); ++n) {
      c.require(out[n] == 0.0 || out[n] >= 0.025,
                "output in the clipped band");
      clipped += out[n] == 0.0;
    }
  }
  c.require(clipped > 0, "clip never engaged");
}

// ---------- A11 ----------
void a11(Criterion& c) {
  // 200-sequence synthetic metric curves
  Rng data_rng(11000, 0);
  std::vector<std::vector<double>> per_seq(200, std::vector<double>(50));
  for (auto& curve : per_seq)
    for (double& v : curve) v = data_rng.uniform();

  Rng r1(11, 0), r2(11, 0);
  const auto sets1 = resample(200, kBootstrapSets, r1);
  const auto sets2 = resample(200, kBootstrapSets, r2);
  c.require(sets1 == sets2, "resample not deterministic");
  const auto b1 = bands(per_seq, sets1);
  const auto b2 = bands(per_seq, sets2);
  for (size_t s = 0; s < b1.size(); ++s) {
    c.require(b1[s].point == b2[s].point && b1[s].q05 == b2[s].q05 &&
                  b1[s].q25 == b2[s].q25 && b1[s].q75 == b2[s].q75 &&
                  b1[s].q95 == b2[s].q95,
              "bands differ across runs at step " + std::to_string(s));
    if (!c.ok) break;
  }

  std::vector<double> fixture;
  for (int i = 20; i >= 1; --i) fixture.push_back(i);
  c.require(quantile(fixture, 0.95) == 19.0,
            "q95 of 20 values is not the 19th order statistic");
}

// ---------- A12 ----------
void a12(Criterion& c) {
  // 100-sequence wind corpus: fuel statistics over the inner region
  {
    SimParams p;
    int fueled = 0;
    int64_t cells = 0;
    double fuel_sum = 0.0;
    for (int s = 0; s < 100; ++s) {
      ScenarioSpec spec = corpus_spec("wind", 0);
      p.n_w = p.n_h = spec.full();
      Rng rng(12000, static_cast<uint64_t>(s));
      const Scenario sc = make_scenario(spec, rng, p);
      for (int i = 5; i < 105; ++i)
        for (int j = 5; j < 105; ++j) {
          const double v = sc.state.density.at(i, j);
          ++cells;
          if (v > 0.0) {
            ++fueled;
            fuel_sum += v;
          }
        }
    }
    const double frac = fueled / static_cast<double>(cells);
    const double mean = fuel_sum / fueled;
    c.info("fueled fraction " + std::to_string(frac) + ", mean " +
           std::to_string(mean));
    c.require(std::fabs(frac - 0.50) <= 0.02, "fueled fraction off");
    c.require(std::fabs(mean - 1.0) <= 0.02, "fueled mean density off");
  }

  // complex corpus: exact altitude range and the wind switch at step 30
  {
    CorpusConfig cfg;
    cfg.corpus = "complex";
    cfg.n = 10;
    cfg.seed = 121;
    cfg.jobs = 4;
    cfg.out_dir = work_dir("a12").string();
    const Manifest m = build_corpus(cfg);
    for (const auto& e : m.entries) {
      const FireSequence seq = read_sequence(m.resolve(e));
      double lo = seq.altitude[0], hi = seq.altitude[0];
      for (size_t n = 0; n < seq.altitude.size(); ++n) {
        lo = std::min(lo, seq.altitude[n]);
        hi = std::max(hi, seq.altitude[n]);
      }
      c.require(lo == 0.0 && hi == 50.0,
                "altitude range [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "] not exactly [0, 50]");
      c.require(seq.wind.segments.size() == 2 &&
                    seq.wind.segments[1].start_step == 30,
                "wind schedule is not two segments switching at 30");
      if (!c.ok) break;
    }
  }
}

// ---------- A13 ----------
void a13(Criterion& c) {
  const fs::path dir = work_dir("a13");
  Rng rng(13000, 0);
  for (int trial = 0; trial < 20 && c.ok; ++trial) {
    FireSequence seq;
    const int rows = 3 + static_cast<int>(rng.uniform_int(6));
    const int cols = 3 + static_cast<int>(rng.uniform_int(6));
    const int t = 1 + static_cast<int>(rng.uniform_int(8));
    auto rand_field = [&]() {
      Field2D f(rows, cols);
      for (size_t n = 0; n < f.size(); ++n)
        f[n] = static_cast<double>(static_cast<float>(rng.uniform(0.0, 3.0)));
      return f;
    };
    seq.density = rand_field();
    seq.altitude = rand_field();
    seq.moisture = rand_field();
    seq.wind.segments = {{0, rng.uniform(-7, 7), rng.uniform(-7, 7)}};
    seq.frames.resize(t);
    for (auto& fr : seq.frames) {
      fr.front = rand_field();
      fr.scar = rand_field();
      fr.fuel = rand_field();
    }
    seq.meta.seed = trial;
    seq.meta.burnout_step = t;

    const std::string path = (dir / ("t" + std::to_string(trial))).string();
    write_sequence(path, seq);
    const FireSequence back = read_sequence(path);
    bool same = back.density == seq.density && back.altitude == seq.altitude &&
                back.moisture == seq.moisture && back.steps() == seq.steps();
    for (int i = 0; i < t && same; ++i)
      same = back.frames[i].front == seq.frames[i].front &&
             back.frames[i].scar == seq.frames[i].scar &&
             back.frames[i].fuel == seq.frames[i].fuel;
    c.require(same, "round trip " + std::to_string(trial) + " not identical");
  }

  const std::string bad = (dir / "bad").string();
  {
    std::ofstream os(bad, std::ios::binary);
    os << "XXXXXXXX junk";
  }
  bool got_magic = false;
  try {
    read_sequence(bad);
  } catch (const Error& e) {
    got_magic = e.kind() == ErrorKind::BadMagic;
  }
  c.require(got_magic, "corrupted magic not flagged as BadMagic");

  const std::string good = (dir / "t0").string();
  const std::string cut = (dir / "cut").string();
  {
    std::ifstream is(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)), {});
    std::ofstream os(cut, std::ios::binary);
    os.write(bytes.data(), bytes.size() - 10);
  }
  bool got_trunc = false;
  try {
    read_sequence(cut);
  } catch (const Error& e) {
    got_trunc = e.kind() == ErrorKind::TruncatedPayload;
  }
  c.require(got_trunc, "truncated payload not flagged as TruncatedPayload");
}

// ---------- A14 ----------
std::vector<std::vector<double>> scar_jsc_curves(
    const Manifest& m, const std::vector<FireSequence>& tests,
    const std::function<std::unique_ptr<Predictor>(const FireSequence&)>& make) {
  std::vector<std::vector<double>> curves;
  for (const auto& seq : tests) {
    auto pred = make(seq);
    const RolloutResult r =
        autoregress(*pred, seq, m.norm, m.channels, 0, 50, 10);
    const auto series = evaluate_series(r.scars, r.truth_scars, Target::Scar);
    std::vector<double> curve;
    for (const auto& msr : series) curve.push_back(msr.jsc);
    curves.push_back(std::move(curve));
  }
  return curves;
}

double curve_mean(const std::vector<StepBand>& b) {
  double acc = 0.0;
  for (const auto& s : b) acc += s.point;
  return acc / b.size();
}

void a14(Criterion& c) {
  const Manifest m = desk_corpus("a14", "wind", 100, 1414);

  // train the desk ConvLSTM on the 80-sequence training split
  const auto data = make_instances(m, "train", 10, 3);
  ConvLstmSpec spec;
  spec.in_channels = 5;
  spec.kernel = 3;
  spec.blocks = 2;
  spec.filters = 4;
  spec.window = 10;
  auto model = build_convlstm(spec, 141);
  TrainConfig cfg;
  cfg.epochs = 12;
  cfg.adam.lr = 1e-3;
  cfg.seed = 141;
  const TrainResult tr = train(*model, data, cfg);
  c.info("train loss " + std::to_string(tr.epoch_loss.front()) + " -> " +
         std::to_string(tr.epoch_loss.back()) + " over " +
         std::to_string(data.size()) + " instances");

  std::vector<FireSequence> tests;
  for (const auto& e : m.split_entries("test"))
    tests.push_back(read_sequence(m.resolve(e)));

  const auto model_curves = scar_jsc_curves(
      m, tests, [&](const FireSequence&) { return neural_predictor(*model, m.norm); });
  const auto zero_curves = scar_jsc_curves(
      m, tests, [&](const FireSequence&) { return zero_predictor(); });
  const auto persist_curves = scar_jsc_curves(
      m, tests, [&](const FireSequence&) { return persistence_predictor(m.norm); });

  Rng rng(14, 0);
  const auto sets = resample(static_cast<int>(tests.size()), kBootstrapSets, rng);
  const auto model_bands = bands(model_curves, sets);
  const auto zero_bands = bands(zero_curves, sets);
  const auto persist_bands = bands(persist_curves, sets);

  const double mm = curve_mean(model_bands);
  const double zm = curve_mean(zero_bands);
  const double pm = curve_mean(persist_bands);
  c.info("mean scar JSC: convlstm " + std::to_string(mm) + ", zero " +
         std::to_string(zm) + ", persistence " + std::to_string(pm));
  c.require(mm > zm, "convlstm does not beat the zero predictor");
  c.require(mm > pm, "convlstm does not beat the persistence predictor");

  for (size_t s = 40; s < 50; ++s) {
    c.require(model_bands[s].q25 > zero_bands[s].q75,
              "50% bands overlap zero at step " + std::to_string(s));
    c.require(model_bands[s].q25 > persist_bands[s].q75,
              "50% bands overlap persistence at step " + std::to_string(s));
    if (!c.ok) break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::function<void(Criterion&)>> table = {
      {"A1", a1},   {"A2", a2},   {"A3", a3},   {"A4", a4},  {"A5", a5},
      {"A6", a6},   {"A7", a7},   {"A8", a8},   {"A9", a9},  {"A10", a10},
      {"A11", a11}, {"A12", a12}, {"A13", a13}, {"A14", a14}};

  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(argv[i]);
  if (wanted.empty())
    for (const auto& [name, fn] : table) wanted.push_back(name);

  int failures = 0;
  for (const auto& name : wanted) {
    const auto it = table.find(name);
    if (it == table.end()) {
      std::cerr << "unknown criterion: " << name << "\n";
      return 1;
    }
    Criterion c;
    try {
      it->second(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.info(std::string("exception: ") + e.what());
    }
    std::cout << name << ": " << (c.ok ? "PASS" : "FAIL");
    const std::string note = c.note.str();
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << "\n" << std::flush;
    failures += !c.ok;
  }
  return failures == 0 ? 0 : 1;
}
