#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "embr/bootstrap.hpp"
#include "embr/dataset.hpp"
#include "embr/metrics.hpp"
#include "embr/rollout.hpp"
#include "embr/sim.hpp"
#include "embr/worldgen.hpp"

namespace py = pybind11;
using namespace embr;

namespace {

py::array_t<double> to_array(const Field2D& f) {
  py::array_t<double> a(std::vector<py::ssize_t>{f.rows(), f.cols()});
  std::copy(f.data(), f.data() + f.size(), a.mutable_data());
  return a;
}

py::array_t<double> to_array(const std::vector<Field2D>& fields) {
  if (fields.empty())
    return py::array_t<double>(std::vector<py::ssize_t>{0, 0, 0});
  const py::ssize_t t = static_cast<py::ssize_t>(fields.size());
  const py::ssize_t r = fields[0].rows(), c = fields[0].cols();
  py::array_t<double> a(std::vector<py::ssize_t>{t, r, c});
  double* out = a.mutable_data();
  for (const auto& f : fields) {
    std::copy(f.data(), f.data() + f.size(), out);
    out += f.size();
  }
  return a;
}

Field2D to_field(const py::array_t<double, py::array::c_style |
                                               py::array::forcecast>& a) {
  if (a.ndim() != 2) throw Error(ErrorKind::Numeric, "expected a 2-d array");
  Field2D f(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + f.size(), f.data());
  return f;
}

std::vector<Field2D> to_fields(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 3) throw Error(ErrorKind::Numeric, "expected a 3-d array");
  std::vector<Field2D> out;
  const int t = static_cast<int>(a.shape(0));
  const int r = static_cast<int>(a.shape(1));
  const int c = static_cast<int>(a.shape(2));
  const double* src = a.data();
  for (int s = 0; s < t; ++s) {
    Field2D f(r, c);
    std::copy(src, src + f.size(), f.data());
    src += f.size();
    out.push_back(std::move(f));
  }
  return out;
}

py::dict sequence_dict(const FireSequence& seq) {
  py::dict d;
  d["density"] = to_array(seq.density);
  d["altitude"] = to_array(seq.altitude);
  d["moisture"] = to_array(seq.moisture);
  std::vector<Field2D> fronts, scars, fuels;
  for (const auto& fr : seq.frames) {
    fronts.push_back(fr.front);
    scars.push_back(fr.scar);
    fuels.push_back(fr.fuel);
  }
  d["fronts"] = to_array(fronts);
  d["scars"] = to_array(scars);
  d["fuels"] = to_array(fuels);
  py::list wind;
  for (const auto& s : seq.wind.segments)
    wind.append(py::make_tuple(s.start_step, s.ux, s.uy));
  d["wind"] = wind;
  d["burnout_step"] = seq.meta.burnout_step;
  d["truncated"] = seq.meta.truncated;
  d["corpus"] = seq.meta.corpus;
  return d;
}

py::dict run_scenario(const std::string& corpus, uint64_t seed, uint64_t index,
                      int inner, int border, int max_steps) {
  ScenarioSpec spec = corpus_spec(corpus, seed);
  spec.inner = inner;
  spec.border = border;
  SimParams params;
  params.n_w = params.n_h = spec.full();
  Rng rng(seed, index);
  Scenario sc = make_scenario(spec, rng, params);
  FireSequence seq = simulate(std::move(sc.state), params, sc.wind, max_steps);
  seq.meta.corpus = corpus;
  seq.meta.seed = seed;
  seq.meta.sequence_index = index;
  return sequence_dict(seq);
}

std::string generate(const std::string& corpus, int n, uint64_t seed,
                     const std::string& out_dir, bool with_validation,
                     int jobs, int inner, int border, int max_steps) {
  CorpusConfig cfg;
  cfg.corpus = corpus;
  cfg.n = n;
  cfg.seed = seed;
  cfg.out_dir = out_dir;
  cfg.with_validation = with_validation;
  cfg.jobs = jobs;
  cfg.inner = inner;
  cfg.border = border;
  cfg.max_steps = max_steps;
  build_corpus(cfg);
  return out_dir + "/manifest.json";
}

py::dict evaluate_entry(const std::string& manifest_path,
                        const std::string& baseline, int index, int steps,
                        int window) {
  const Manifest m = load_manifest(manifest_path);
  const auto entries = m.split_entries("test");
  if (index < 0 || index >= static_cast<int>(entries.size()))
    throw Error(ErrorKind::Usage, "index outside the test split");
  const FireSequence seq = read_sequence(m.resolve(entries[index]));

  std::unique_ptr<Predictor> pred;
  if (baseline == "oracle") pred = oracle_predictor(seq, 0, true);
  else if (baseline == "zero") pred = zero_predictor();
  else if (baseline == "persistence") pred = persistence_predictor(m.norm);
  else throw Error(ErrorKind::Usage, "unknown baseline: " + baseline);

  const RolloutResult r =
      autoregress(*pred, seq, m.norm, m.channels, 0, steps, window);
  py::dict d;
  d["fronts"] = to_array(r.fronts);
  d["scars"] = to_array(r.scars);
  d["truth_fronts"] = to_array(r.truth_fronts);
  d["truth_scars"] = to_array(r.truth_scars);
  for (const Target target : {Target::Front, Target::Scar}) {
    const auto& pred_series = target == Target::Front ? r.fronts : r.scars;
    const auto& truth_series =
        target == Target::Front ? r.truth_fronts : r.truth_scars;
    const auto series = evaluate_series(pred_series, truth_series, target);
    py::dict metrics;
    std::vector<double> vm, vs, vj, va;
    for (const auto& s : series) {
      vm.push_back(s.mse);
      vs.push_back(s.ste);
      vj.push_back(s.jsc);
      va.push_back(s.sa);
    }
    metrics["mse"] = vm;
    metrics["ste"] = vs;
    metrics["jsc"] = vj;
    metrics["sa"] = va;
    d[target_name(target)] = metrics;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "wildfire-dynamics workbench core";

  py::register_exception<Error>(m, "EmbrError");

  m.def("simulate", &run_scenario, py::arg("corpus"), py::arg("seed"),
        py::arg("index") = 0, py::arg("inner") = 100, py::arg("border") = 5,
        py::arg("max_steps") = kDefaultMaxSteps,
        "Generate one scenario and run the fire simulation; returns a dict "
        "of numpy arrays.");

  m.def("generate", &generate, py::arg("corpus"), py::arg("n"),
        py::arg("seed"), py::arg("out_dir"), py::arg("with_validation") = false,
        py::arg("jobs") = 1, py::arg("inner") = 100, py::arg("border") = 5,
        py::arg("max_steps") = kDefaultMaxSteps,
        "Build a corpus on disk; returns the manifest path.");

  m.def(
      "read_sequence",
      [](const std::string& path) { return sequence_dict(read_sequence(path)); },
      py::arg("path"), "Load one sequence file as a dict of numpy arrays.");

  m.def(
      "mse", [](const py::array_t<double>& a, const py::array_t<double>& b) {
        return mse(to_field(a), to_field(b));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "ste", [](const py::array_t<double>& a, const py::array_t<double>& b) {
        return ste(to_field(a), to_field(b));
      },
      py::arg("pred"), py::arg("truth"));
  m.def(
      "jsc",
      [](const py::array_t<double>& a, const py::array_t<double>& b,
         double threshold) { return jsc(to_field(a), to_field(b), threshold); },
      py::arg("pred"), py::arg("truth"), py::arg("threshold") = kFireThreshold);
  m.def(
      "shape_agreement",
      [](const py::array_t<double>& p, const py::array_t<double>& t,
         double threshold, int horizon) {
        return shape_agreement(to_fields(p), to_fields(t), threshold, horizon);
      },
      py::arg("pred_fronts"), py::arg("truth_fronts"),
      py::arg("threshold") = kFireThreshold, py::arg("horizon") = kSaHorizon,
      "Arrival-time shape agreement over (T, H, W) front stacks.");

  m.def("evaluate_baseline", &evaluate_entry, py::arg("manifest"),
        py::arg("baseline"), py::arg("index") = 0, py::arg("steps") = 50,
        py::arg("window") = 10,
        "Autoregressive rollout of a baseline predictor over one test "
        "sequence; returns predictions and per-step metric curves.");

  m.attr("FIRE_THRESHOLD") = kFireThreshold;
  m.attr("SA_HORIZON") = kSaHorizon;
  m.attr("BOOTSTRAP_SETS") = kBootstrapSets;
}
