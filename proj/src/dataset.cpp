#include "embr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

#include <json.hpp>

namespace embr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {
constexpr char kMagic[8] = {'E', 'M', 'B', 'R', 'S', 'E', 'Q', '1'};

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
         (uint32_t(b[3]) << 24);
}

void put_field_f32(std::ostream& os, const Field2D& f, const std::string& path) {
  for (size_t n = 0; n < f.size(); ++n) {
    if (!std::isfinite(f[n]))
      throw Error(ErrorKind::NonFiniteValue,
                  "non-finite value while writing " + path);
    const float x = static_cast<float>(f[n]);
    static_assert(sizeof(float) == 4);
    os.write(reinterpret_cast<const char*>(&x), 4);
  }
}

Field2D get_field_f32(std::istream& is, int rows, int cols,
                      const std::string& path) {
  Field2D f(rows, cols);
  std::vector<float> buf(f.size());
  is.read(reinterpret_cast<char*>(buf.data()), buf.size() * 4);
  if (!is)
    throw Error(ErrorKind::TruncatedPayload, "truncated payload: " + path);
  for (size_t n = 0; n < f.size(); ++n) {
    if (!std::isfinite(buf[n]))
      throw Error(ErrorKind::NonFiniteValue,
                  "non-finite value while reading " + path);
    f[n] = static_cast<double>(buf[n]);
  }
  return f;
}
}  // namespace

std::vector<std::string> corpus_channels(const std::string& corpus) {
  std::vector<std::string> ch = {"vegetation", "scar", "front", "wind_x",
                                 "wind_y"};
  if (corpus == "wind") return ch;
  ch.push_back("terrain");
  if (corpus == "wind-slope") return ch;
  if (corpus == "complex") {
    ch.push_back("moisture");
    return ch;
  }
  throw Error(ErrorKind::Usage, "unknown corpus: " + corpus);
}

const ChannelNorm& NormStats::at(const std::string& name) const {
  auto it = channels.find(name);
  if (it == channels.end())
    throw Error(ErrorKind::BadFormat, "missing norm stats for " + name);
  return it->second;
}

double normalize_value(const ChannelNorm& n, double x) {
  if (n.standardized) {
    const double sd = n.stddev > 1e-12 ? n.stddev : 1.0;
    return (x - n.mean) / sd;
  }
  if (n.max <= n.min) return 0.0;  // degenerate range rule
  return (x - n.min) / (n.max - n.min);
}

double denormalize_value(const ChannelNorm& n, double x) {
  if (n.standardized) {
    const double sd = n.stddev > 1e-12 ? n.stddev : 1.0;
    return x * sd + n.mean;
  }
  if (n.max <= n.min) return n.min;
  return x * (n.max - n.min) + n.min;
}

void write_sequence(const std::string& path, const FireSequence& seq) {
  json hdr;
  hdr["dims"] = {seq.density.rows(), seq.density.cols()};
  hdr["statics"] = {"density", "altitude", "moisture"};
  hdr["frame_channels"] = {"front", "scar", "fuel"};
  hdr["t"] = seq.steps();
  hdr["index_convention"] =
      "first index east (x), second north (y), row-major";
  hdr["seed"] = seq.meta.seed;
  hdr["sequence_index"] = seq.meta.sequence_index;
  hdr["corpus"] = seq.meta.corpus;
  hdr["burnout_step"] = seq.meta.burnout_step;
  hdr["truncated"] = seq.meta.truncated;
  hdr["predicted"] = seq.meta.predicted;
  json wind = json::array();
  for (const auto& s : seq.wind.segments)
    wind.push_back({s.start_step, s.ux, s.uy});
  hdr["wind"] = wind;
  hdr["norm_reference"] = "manifest.json";
  const std::string hs = hdr.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  os.write(kMagic, 8);
  put_u32(os, static_cast<uint32_t>(hs.size()));
  os.write(hs.data(), hs.size());
  put_field_f32(os, seq.density, path);
  put_field_f32(os, seq.altitude, path);
  put_field_f32(os, seq.moisture, path);
  for (const auto& fr : seq.frames) put_field_f32(os, fr.front, path);
  for (const auto& fr : seq.frames) put_field_f32(os, fr.scar, path);
  for (const auto& fr : seq.frames) put_field_f32(os, fr.fuel, path);
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

FireSequence read_sequence(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::Io, "cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw Error(ErrorKind::BadMagic, "bad magic: " + path);
  const uint32_t hlen = get_u32(is);
  if (!is || hlen == 0 || hlen > (1u << 24))
    throw Error(ErrorKind::BadFormat, "bad header length: " + path);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  if (!is) throw Error(ErrorKind::TruncatedPayload, "truncated header: " + path);

  json hdr;
  try {
    hdr = json::parse(hs);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadFormat,
                "bad header json: " + path + ": " + e.what());
  }

  FireSequence seq;
  try {
    const int rows = hdr.at("dims").at(0).get<int>();
    const int cols = hdr.at("dims").at(1).get<int>();
    const int t = hdr.at("t").get<int>();
    if (rows <= 0 || cols <= 0 || t < 0)
      throw Error(ErrorKind::BadFormat, "bad dims: " + path);
    seq.meta.seed = hdr.value("seed", uint64_t(0));
    seq.meta.sequence_index = hdr.value("sequence_index", uint64_t(0));
    seq.meta.corpus = hdr.value("corpus", std::string());
    seq.meta.burnout_step = hdr.value("burnout_step", t);
    seq.meta.truncated = hdr.value("truncated", false);
    seq.meta.predicted = hdr.value("predicted", false);
    for (const auto& s : hdr.at("wind"))
      seq.wind.segments.push_back(
          {s.at(0).get<int>(), s.at(1).get<double>(), s.at(2).get<double>()});

    seq.density = get_field_f32(is, rows, cols, path);
    seq.altitude = get_field_f32(is, rows, cols, path);
    seq.moisture = get_field_f32(is, rows, cols, path);
    seq.frames.resize(t);
    for (auto& fr : seq.frames) fr.front = get_field_f32(is, rows, cols, path);
    for (auto& fr : seq.frames) fr.scar = get_field_f32(is, rows, cols, path);
    for (auto& fr : seq.frames) fr.fuel = get_field_f32(is, rows, cols, path);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadFormat,
                "bad header fields: " + path + ": " + e.what());
  }
  return seq;
}

std::vector<ManifestEntry> Manifest::split_entries(
    const std::string& split) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.split == split) out.push_back(e);
  return out;
}

std::string Manifest::resolve(const ManifestEntry& e) const {
  return (fs::path(dir) / e.path).string();
}

namespace {

// Streaming accumulator for one channel.
struct ChannelAcc {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0, sumsq = 0.0;
  uint64_t count = 0;

  void add(double x) {
    min = std::min(min, x);
    max = std::max(max, x);
    sum += x;
    sumsq += x * x;
    ++count;
  }
  void add_field(const Field2D& f) {
    for (size_t n = 0; n < f.size(); ++n) add(f[n]);
  }
  void merge(const ChannelAcc& o) {
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    sum += o.sum;
    sumsq += o.sumsq;
    count += o.count;
  }
  ChannelNorm minmax() const {
    ChannelNorm n;
    n.standardized = false;
    n.min = count ? min : 0.0;
    n.max = count ? max : 0.0;
    return n;
  }
  ChannelNorm meanstd() const {
    ChannelNorm n;
    n.standardized = true;
    if (count) {
      n.mean = sum / count;
      const double var = std::max(0.0, sumsq / count - n.mean * n.mean);
      n.stddev = std::sqrt(var);
    }
    return n;
  }
};

struct SeqStats {
  ChannelAcc vegetation, scar, front, terrain, moisture, wind_x, wind_y;

  void accumulate(const FireSequence& seq) {
    for (const auto& fr : seq.frames) {
      vegetation.add_field(fr.fuel);
      scar.add_field(fr.scar);
      front.add_field(fr.front);
    }
    terrain.add_field(seq.altitude);
    moisture.add_field(seq.moisture);
    for (int t = 0; t < seq.steps(); ++t) {
      const auto [ux, uy] = seq.wind.wind_at(t);
      wind_x.add(ux);
      wind_y.add(uy);
    }
  }
  void merge(const SeqStats& o) {
    vegetation.merge(o.vegetation);
    scar.merge(o.scar);
    front.merge(o.front);
    terrain.merge(o.terrain);
    moisture.merge(o.moisture);
    wind_x.merge(o.wind_x);
    wind_y.merge(o.wind_y);
  }
};

std::string seq_filename(uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "seq_%05llu.embrseq",
                static_cast<unsigned long long>(index));
  return buf;
}

}  // namespace

Manifest build_corpus(const CorpusConfig& cfg) {
  if (cfg.n < 1)
    throw Error(ErrorKind::Usage, "build_corpus: n must be >= 1");
  fs::create_directories(cfg.out_dir);

  ScenarioSpec spec = corpus_spec(cfg.corpus, cfg.seed);
  spec.inner = cfg.inner;
  spec.border = cfg.border;
  SimParams params;
  params.n_w = spec.full();
  params.n_h = spec.full();

  const int n_train = (cfg.n * 4) / 5;
  const int n_val = cfg.with_validation ? std::max(1, cfg.n / 5) : 0;
  const int total = cfg.n + n_val;

  Manifest m;
  m.corpus = cfg.corpus;
  m.n = cfg.n;
  m.seed = cfg.seed;
  m.channels = corpus_channels(cfg.corpus);
  m.inner = cfg.inner;
  m.border = cfg.border;
  m.max_steps = cfg.max_steps;
  m.dir = cfg.out_dir;

  std::vector<SeqStats> train_stats(total);
  auto run_one = [&](int i) {
    Rng rng(cfg.seed, static_cast<uint64_t>(i));
    Scenario sc = make_scenario(spec, rng, params);
    FireSequence seq =
        simulate(std::move(sc.state), params, sc.wind, cfg.max_steps);
    seq.meta.seed = cfg.seed;
    seq.meta.sequence_index = static_cast<uint64_t>(i);
    seq.meta.corpus = cfg.corpus;
    write_sequence((fs::path(cfg.out_dir) / seq_filename(i)).string(), seq);
    if (i < n_train) train_stats[i].accumulate(seq);
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int i = 0; i < total; ++i) run_one(i);
  } else {
    std::vector<std::future<void>> tasks;
    for (int w = 0; w < jobs; ++w)
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (int i = w; i < total; i += jobs) run_one(i);
      }));
    for (auto& t : tasks) t.get();
  }

  // Reduce per-sequence stats in index order for determinism.
  SeqStats agg;
  for (int i = 0; i < n_train; ++i) agg.merge(train_stats[i]);
  m.norm.channels["vegetation"] = agg.vegetation.minmax();
  m.norm.channels["scar"] = agg.scar.minmax();
  m.norm.channels["front"] = agg.front.minmax();
  m.norm.channels["wind_x"] = agg.wind_x.meanstd();
  m.norm.channels["wind_y"] = agg.wind_y.meanstd();
  for (const auto& ch : m.channels) {
    if (ch == "terrain") m.norm.channels["terrain"] = agg.terrain.minmax();
    if (ch == "moisture") m.norm.channels["moisture"] = agg.moisture.minmax();
  }

  for (int i = 0; i < total; ++i) {
    ManifestEntry e;
    e.path = seq_filename(i);
    e.index = static_cast<uint64_t>(i);
    e.split = i < n_train ? "train" : (i < cfg.n ? "test" : "validation");
    m.entries.push_back(e);
  }

  write_manifest(m, (fs::path(cfg.out_dir) / "manifest.json").string());
  return m;
}

namespace {
json norm_to_json(const NormStats& norm) {
  json j;
  for (const auto& [name, n] : norm.channels) {
    if (n.standardized)
      j[name] = {{"kind", "meanstd"}, {"mean", n.mean}, {"stddev", n.stddev}};
    else
      j[name] = {{"kind", "minmax"}, {"min", n.min}, {"max", n.max}};
  }
  return j;
}

NormStats norm_from_json(const json& j) {
  NormStats norm;
  for (auto it = j.begin(); it != j.end(); ++it) {
    ChannelNorm n;
    if (it.value().at("kind") == "meanstd") {
      n.standardized = true;
      n.mean = it.value().at("mean").get<double>();
      n.stddev = it.value().at("stddev").get<double>();
    } else {
      n.min = it.value().at("min").get<double>();
      n.max = it.value().at("max").get<double>();
    }
    norm.channels[it.key()] = n;
  }
  return norm;
}
}  // namespace

void write_manifest(const Manifest& m, const std::string& path) {
  json j;
  j["format"] = "EMBRSEQ1";
  j["corpus"] = m.corpus;
  j["n"] = m.n;
  j["seed"] = m.seed;
  j["channels"] = m.channels;
  j["inner"] = m.inner;
  j["border"] = m.border;
  j["max_steps"] = m.max_steps;
  json files = json::array();
  for (const auto& e : m.entries)
    files.push_back({{"path", e.path}, {"split", e.split}, {"index", e.index}});
  j["files"] = files;
  j["norm_stats"] = norm_to_json(m.norm);
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  os << j.dump(2) << "\n";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Io, "cannot open: " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadFormat, "bad manifest: " + path + ": " + e.what());
  }
  Manifest m;
  try {
    m.corpus = j.at("corpus").get<std::string>();
    m.n = j.at("n").get<int>();
    m.seed = j.at("seed").get<uint64_t>();
    m.channels = j.at("channels").get<std::vector<std::string>>();
    m.inner = j.value("inner", 100);
    m.border = j.value("border", 5);
    m.max_steps = j.value("max_steps", kDefaultMaxSteps);
    for (const auto& f : j.at("files"))
      m.entries.push_back({f.at("path").get<std::string>(),
                           f.at("split").get<std::string>(),
                           f.at("index").get<uint64_t>()});
    m.norm = norm_from_json(j.at("norm_stats"));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadFormat,
                "bad manifest fields: " + path + ": " + e.what());
  }
  // channel-count contract: 5 (wind), 6 (wind-slope), 7 (complex)
  if (m.channels != corpus_channels(m.corpus))
    throw Error(ErrorKind::BadFormat,
                "manifest channels do not match corpus: " + path);
  m.dir = fs::path(path).parent_path().string();
  return m;
}

TrainingInstance window_instance(const FireSequence& seq, int t0, int window,
                                 const std::vector<std::string>& channels) {
  if (t0 < 0 || t0 >= seq.steps() - 1)
    throw Error(ErrorKind::Numeric, "window_instance: t0 out of range");
  const int rows = seq.density.rows(), cols = seq.density.cols();
  const int nc = static_cast<int>(channels.size());

  TrainingInstance inst;
  inst.window = Tensor({window, rows, cols, nc});
  for (int s = 0; s < window; ++s) {
    const int f = std::max(0, t0 - (window - 1) + s);
    const FireFrame& fr = seq.frames[f];
    const auto [ux, uy] = seq.wind.wind_at(f);
    for (int c = 0; c < nc; ++c) {
      const std::string& name = channels[c];
      const Field2D* plane = nullptr;
      double constant = 0.0;
      bool is_const = false;
      if (name == "vegetation") plane = &fr.fuel;
      else if (name == "scar") plane = &fr.scar;
      else if (name == "front") plane = &fr.front;
      else if (name == "terrain") plane = &seq.altitude;
      else if (name == "moisture") plane = &seq.moisture;
      else if (name == "wind_x") { is_const = true; constant = ux; }
      else if (name == "wind_y") { is_const = true; constant = uy; }
      else throw Error(ErrorKind::BadFormat, "unknown channel: " + name);
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          inst.window.at4(s, i, j, c) =
              is_const ? constant : plane->at(i, j);
    }
  }
  inst.label = seq.frames[t0 + 1].front;
  return inst;
}

void normalize_window(Tensor& window, const NormStats& stats,
                      const std::vector<std::string>& channels) {
  const int nc = window.dim(window.rank() - 1);
  if (nc != static_cast<int>(channels.size()))
    throw Error(ErrorKind::Numeric, "normalize_window: channel mismatch");
  std::vector<ChannelNorm> norms;
  for (const auto& name : channels) norms.push_back(stats.at(name));
  double* v = window.data();
  const size_t total = window.size();
  for (size_t n = 0; n < total; ++n)
    v[n] = normalize_value(norms[n % nc], v[n]);
}

void normalize_instance(TrainingInstance& inst, const NormStats& stats,
                        const std::vector<std::string>& channels) {
  normalize_window(inst.window, stats, channels);
  const ChannelNorm& front = stats.at("front");
  for (size_t n = 0; n < inst.label.size(); ++n)
    inst.label[n] = normalize_value(front, inst.label[n]);
}

}  // namespace embr
