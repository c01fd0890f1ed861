// embr: corpus generation, training, rollout evaluation and rendering.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "embr/bootstrap.hpp"
#include "embr/dataset.hpp"
#include "embr/metrics.hpp"
#include "embr/neural.hpp"
#include "embr/render.hpp"
#include "embr/rollout.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace embr;

namespace {

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Usage:
      return 1;
    case ErrorKind::NonFiniteValue:
    case ErrorKind::Numeric:
      return 3;
    default:
      return 2;  // data / format / io
  }
}

void write_provenance(const std::string& path, const json& cfg) {
  std::ofstream os(path);
  os << cfg.dump(2) << "\n";
  if (!os) throw Error(ErrorKind::Io, "cannot write " + path);
}

// ---- gen ----

struct GenArgs {
  std::string corpus = "wind";
  int n = 10;
  uint64_t seed = 0;
  std::string out;
  bool with_validation = false;
  int jobs = 1;
  int inner = 100, border = 5, max_steps = kDefaultMaxSteps;
};

int cmd_gen(const GenArgs& a) {
  CorpusConfig cfg;
  cfg.corpus = a.corpus;
  cfg.n = a.n;
  cfg.seed = a.seed;
  cfg.out_dir = a.out;
  cfg.with_validation = a.with_validation;
  cfg.jobs = a.jobs;
  cfg.inner = a.inner;
  cfg.border = a.border;
  cfg.max_steps = a.max_steps;
  Manifest m = build_corpus(cfg);
  std::cerr << "gen: wrote " << m.entries.size() << " sequences to " << a.out
            << "\n";
  write_provenance((fs::path(a.out) / "gen.config.json").string(),
                   {{"command", "gen"},
                    {"corpus", a.corpus},
                    {"n", a.n},
                    {"seed", a.seed},
                    {"out", a.out},
                    {"with_validation", a.with_validation},
                    {"jobs", a.jobs},
                    {"inner", a.inner},
                    {"border", a.border},
                    {"max_steps", a.max_steps}});
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string model = "convlstm";  // cnn | cnn-thresholded | convlstm
  std::string data;                // manifest path
  std::string profile = "desk";    // desk | paper
  int epochs = 10;
  double lr = 1e-4;
  uint64_t seed = 0;
  std::string out = "model.embrmdl";
  int window = 10;
  int stride = 1;
  int max_sequences = 0;  // 0 = all
};

std::unique_ptr<Model> make_model(const std::string& name,
                                  const std::string& profile, int in_channels,
                                  int window, uint64_t seed) {
  const bool desk = profile == "desk";
  if (!desk && profile != "paper")
    throw Error(ErrorKind::Usage, "unknown profile: " + profile);
  if (name == "cnn" || name == "cnn-thresholded") {
    CnnSpec s;
    s.in_channels = in_channels;
    if (desk) {
      s.kernel = 3;
      s.filters = {4, 8};
    }
    s.clip = name == "cnn-thresholded" ? 0.025 : 0.0;
    return build_cnn(s, seed);
  }
  if (name == "convlstm") {
    ConvLstmSpec s;
    s.in_channels = in_channels;
    s.window = window;
    if (desk) {
      s.kernel = 3;
      s.blocks = 2;
      s.filters = 4;
    }
    return build_convlstm(s, seed);
  }
  throw Error(ErrorKind::Usage, "unknown model: " + name);
}

int cmd_train(const TrainArgs& a) {
  Manifest m = load_manifest(a.data);
  auto entries = m.split_entries("train");
  if (a.max_sequences > 0 &&
      entries.size() > static_cast<size_t>(a.max_sequences))
    entries.resize(a.max_sequences);
  if (entries.empty())
    throw Error(ErrorKind::BadFormat, "train: manifest has no training split");

  auto model = make_model(a.model, a.profile, static_cast<int>(m.channels.size()),
                          a.window, a.seed);
  const int window = model->single_frame() ? 1 : a.window;

  std::vector<TrainingInstance> data;
  for (const auto& e : entries) {
    FireSequence seq = read_sequence(m.resolve(e));
    for (int t0 = 0; t0 + 1 < seq.steps(); t0 += a.stride) {
      TrainingInstance inst = window_instance(seq, t0, window, m.channels);
      normalize_instance(inst, m.norm, m.channels);
      data.push_back(std::move(inst));
    }
  }
  std::cerr << "train: " << data.size() << " instances from "
            << entries.size() << " sequences\n";

  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.adam.lr = a.lr;
  cfg.seed = a.seed;
  TrainResult result = train(*model, data, cfg);
  for (size_t i = 0; i < result.epoch_loss.size(); ++i)
    std::cerr << "epoch " << i << " loss " << result.epoch_loss[i] << "\n";

  save_model(a.out, *model);
  {
    std::ofstream os(a.out + ".loss.csv");
    os << "epoch,loss\n";
    for (size_t i = 0; i < result.epoch_loss.size(); ++i)
      os << i << "," << result.epoch_loss[i] << "\n";
  }
  write_provenance(a.out + ".config.json", {{"command", "train"},
                                            {"model", a.model},
                                            {"data", a.data},
                                            {"profile", a.profile},
                                            {"epochs", a.epochs},
                                            {"lr", a.lr},
                                            {"seed", a.seed},
                                            {"out", a.out},
                                            {"window", a.window},
                                            {"stride", a.stride},
                                            {"max_sequences", a.max_sequences}});
  return 0;
}

// ---- evaluate ----

struct EvalArgs {
  std::string data;
  std::string split = "test";
  std::string model;     // checkpoint path
  std::string baseline;  // oracle | zero | persistence
  int steps = 50;
  int window = 10;
  int t_start = 0;
  int bootstrap = kBootstrapSets;
  uint64_t seed = 0;
  std::string out = ".";
  int jobs = 1;
  int max_sequences = 0;
};

struct SeqCurves {
  // [target][metric][step]
  std::vector<StepMetrics> front, scar;
};

SeqCurves eval_one(const EvalArgs& a, const Manifest& m,
                   const ManifestEntry& entry, Model* model) {
  FireSequence seq = read_sequence(m.resolve(entry));
  std::unique_ptr<Predictor> pred;
  if (model) {
    pred = neural_predictor(*model, m.norm);
  } else if (a.baseline == "oracle") {
    pred = oracle_predictor(seq, a.t_start, /*extend=*/true);
  } else if (a.baseline == "zero") {
    pred = zero_predictor();
  } else if (a.baseline == "persistence") {
    pred = persistence_predictor(m.norm);
  } else {
    throw Error(ErrorKind::Usage, "unknown baseline: " + a.baseline);
  }
  RolloutResult r =
      autoregress(*pred, seq, m.norm, m.channels, a.t_start, a.steps, a.window);
  SeqCurves c;
  c.front = evaluate_series(r.fronts, r.truth_fronts, Target::Front);
  c.scar = evaluate_series(r.scars, r.truth_scars, Target::Scar);
  return c;
}

int cmd_evaluate(const EvalArgs& a) {
  if (a.model.empty() == a.baseline.empty())
    throw Error(ErrorKind::Usage,
                "evaluate: give exactly one of --model or --baseline");
  Manifest m = load_manifest(a.data);
  auto entries = m.split_entries(a.split);
  if (a.max_sequences > 0 &&
      entries.size() > static_cast<size_t>(a.max_sequences))
    entries.resize(a.max_sequences);
  if (entries.empty())
    throw Error(ErrorKind::BadFormat, "evaluate: empty split " + a.split);

  const size_t n_seq = entries.size();
  std::vector<SeqCurves> curves(n_seq);
  const int jobs = std::max(1, a.jobs);
  std::vector<std::future<void>> futs;
  for (int w = 0; w < jobs; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w] {
      // each worker owns a model instance: predict() caches are not shared
      std::unique_ptr<Model> model;
      if (!a.model.empty()) model = load_model(a.model);
      for (size_t i = w; i < n_seq; i += jobs)
        curves[i] = eval_one(a, m, entries[i], model.get());
    }));
  }
  for (auto& f : futs) f.get();

  fs::create_directories(a.out);
  const char* metric_names[4] = {"mse", "ste", "jsc", "sa"};
  auto metric_value = [](const StepMetrics& s, int k) {
    switch (k) {
      case 0: return s.mse;
      case 1: return s.ste;
      case 2: return s.jsc;
      default: return s.sa;
    }
  };

  Rng rng(a.seed, 0xB005);
  const auto sets = resample(static_cast<int>(n_seq), a.bootstrap, rng);

  std::ofstream points((fs::path(a.out) / "metrics.csv").string());
  std::ofstream band_csv((fs::path(a.out) / "bands.csv").string());
  points << "step,target,metric,value\n";
  band_csv << "step,target,metric,point,q05,q25,q75,q95\n";
  for (int tgt = 0; tgt < 2; ++tgt) {
    const char* tname = tgt == 0 ? "front" : "scar";
    for (int k = 0; k < 4; ++k) {
      std::vector<std::vector<double>> per_seq(n_seq);
      for (size_t i = 0; i < n_seq; ++i) {
        const auto& series = tgt == 0 ? curves[i].front : curves[i].scar;
        for (const auto& s : series) per_seq[i].push_back(metric_value(s, k));
      }
      const auto b = bands(per_seq, sets);
      for (size_t step = 0; step < b.size(); ++step) {
        points << step << "," << tname << "," << metric_names[k] << ","
               << b[step].point << "\n";
        band_csv << step << "," << tname << "," << metric_names[k] << ","
                 << b[step].point << "," << b[step].q05 << "," << b[step].q25
                 << "," << b[step].q75 << "," << b[step].q95 << "\n";
      }
    }
  }
  if (!points || !band_csv)
    throw Error(ErrorKind::Io, "evaluate: failed writing reports");

  write_provenance((fs::path(a.out) / "evaluate.config.json").string(),
                   {{"command", "evaluate"},
                    {"data", a.data},
                    {"split", a.split},
                    {"model", a.model},
                    {"baseline", a.baseline},
                    {"steps", a.steps},
                    {"window", a.window},
                    {"t_start", a.t_start},
                    {"bootstrap", a.bootstrap},
                    {"seed", a.seed},
                    {"out", a.out},
                    {"jobs", a.jobs},
                    {"max_sequences", a.max_sequences}});
  std::cerr << "evaluate: " << n_seq << " sequences -> " << a.out << "\n";
  return 0;
}

// ---- render ----

struct RenderArgs {
  std::string input;
  std::string channel = "front";
  std::string compare;  // optional second sequence for composites
  std::string out = "frames";
};

int cmd_render(const RenderArgs& a) {
  FireSequence seq = read_sequence(a.input);
  fs::create_directories(a.out);
  if (a.compare.empty()) {
    render_sequence(seq, a.channel, a.out);
  } else {
    FireSequence truth = read_sequence(a.compare);
    const int t_len = std::min(seq.steps(), truth.steps());
    for (int t = 0; t < t_len; ++t) {
      char name[32];
      std::snprintf(name, sizeof(name), "compare_%05d.ppm", t);
      const Field2D& p =
          a.channel == "scar" ? seq.frames[t].scar : seq.frames[t].front;
      const Field2D& q =
          a.channel == "scar" ? truth.frames[t].scar : truth.frames[t].front;
      write_comparison_ppm((fs::path(a.out) / name).string(), p, q);
    }
  }
  write_provenance((fs::path(a.out) / "render.config.json").string(),
                   {{"command", "render"},
                    {"input", a.input},
                    {"channel", a.channel},
                    {"compare", a.compare},
                    {"out", a.out}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embr: wildfire-dynamics workbench"};
  app.require_subcommand(1);

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "generate a corpus");
  gen->add_option("--corpus", g.corpus, "wind | wind-slope | complex");
  gen->add_option("--n", g.n, "number of train+test sequences");
  gen->add_option("--seed", g.seed, "corpus seed");
  gen->add_option("--out", g.out, "output directory")->required();
  gen->add_flag("--with-validation", g.with_validation, "add n/5 extra");
  gen->add_option("--jobs", g.jobs, "parallel simulations");
  gen->add_option("--inner", g.inner, "vegetated region size");
  gen->add_option("--border", g.border, "zero-pad ring width");
  gen->add_option("--max-steps", g.max_steps, "simulation step cap");

  TrainArgs t;
  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--model", t.model, "cnn | cnn-thresholded | convlstm");
  tr->add_option("--data", t.data, "manifest path")->required();
  tr->add_option("--profile", t.profile, "desk | paper");
  tr->add_option("--epochs", t.epochs, "training epochs");
  tr->add_option("--lr", t.lr, "Adam learning rate");
  tr->add_option("--seed", t.seed, "init & shuffle seed");
  tr->add_option("--out", t.out, "checkpoint path");
  tr->add_option("--window", t.window, "window length T");
  tr->add_option("--stride", t.stride, "window start stride");
  tr->add_option("--max-sequences", t.max_sequences, "cap train sequences");

  EvalArgs e;
  auto* ev = app.add_subcommand("evaluate", "rollout evaluation reports");
  ev->add_option("--data", e.data, "manifest path")->required();
  ev->add_option("--split", e.split, "train | test | validation");
  ev->add_option("--model", e.model, "checkpoint path");
  ev->add_option("--baseline", e.baseline, "oracle | zero | persistence");
  ev->add_option("--steps", e.steps, "rollout length");
  ev->add_option("--window", e.window, "window length T");
  ev->add_option("--t-start", e.t_start, "rollout start frame");
  ev->add_option("--bootstrap", e.bootstrap, "bootstrap resamples");
  ev->add_option("--seed", e.seed, "bootstrap seed");
  ev->add_option("--out", e.out, "report directory");
  ev->add_option("--jobs", e.jobs, "parallel rollouts");
  ev->add_option("--max-sequences", e.max_sequences, "cap split size");

  RenderArgs r;
  auto* re = app.add_subcommand("render", "write PGM/PPM frames");
  re->add_option("--input", r.input, "sequence file")->required();
  re->add_option("--channel", r.channel, "front | scar | fuel");
  re->add_option("--compare", r.compare, "truth sequence for composites");
  re->add_option("--out", r.out, "output directory");

  try {
    app.parse(argc, argv);
    if (*gen) return cmd_gen(g);
    if (*tr) return cmd_train(t);
    if (*ev) return cmd_evaluate(e);
    if (*re) return cmd_render(r);
  } catch (const CLI::ParseError& pe) {
    const int rc = app.exit(pe);
    return rc == 0 ? 0 : 1;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code(err);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 1;
}
