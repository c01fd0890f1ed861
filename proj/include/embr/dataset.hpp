#pragma once

#include <map>
#include <string>
#include <vector>

#include "embr/sim.hpp"
#include "embr/tensor.hpp"
#include "embr/worldgen.hpp"

namespace embr {

// Channel order is fixed: vegetation, scar, front, wind_x, wind_y, then
// terrain (wind-slope, complex) and moisture (complex only).
std::vector<std::string> corpus_channels(const std::string& corpus);

struct ChannelNorm {
  bool standardized = false;  // wind channels: (x - mean) / stddev
  double min = 0.0, max = 0.0;
  double mean = 0.0, stddev = 1.0;
};

// Per-channel normalization constants, computed on the training split.
struct NormStats {
  std::map<std::string, ChannelNorm> channels;

  const ChannelNorm& at(const std::string& name) const;
};

double normalize_value(const ChannelNorm& n, double x);
double denormalize_value(const ChannelNorm& n, double x);

// ---- on-disk format ----
//
// Per-sequence file: 8-byte magic "EMBRSEQ1", uint32 LE header length,
// UTF-8 JSON header, then raw little-endian float32 payload, row-major:
// statics (density, altitude, moisture) followed by the per-step frames in
// channel-then-time order (all fronts, all scars, all fuels). First index
// runs east (x), second north (y).
void write_sequence(const std::string& path, const FireSequence& seq);
FireSequence read_sequence(const std::string& path);

struct ManifestEntry {
  std::string path;   // relative to the manifest directory
  std::string split;  // "train", "test" or "validation"
  uint64_t index = 0;
};

struct Manifest {
  std::string corpus;
  int n = 0;
  uint64_t seed = 0;
  std::vector<std::string> channels;
  std::vector<ManifestEntry> entries;
  NormStats norm;
  int inner = 100, border = 5, max_steps = kDefaultMaxSteps;
  std::string dir;  // directory the manifest was loaded from / written to

  std::vector<ManifestEntry> split_entries(const std::string& split) const;
  std::string resolve(const ManifestEntry& e) const;
};

struct CorpusConfig {
  std::string corpus = "wind";
  int n = 10;
  uint64_t seed = 0;
  std::string out_dir;
  bool with_validation = false;  // adds n/5 extra sequences
  int jobs = 1;
  int inner = 100;
  int border = 5;
  int max_steps = kDefaultMaxSteps;
};

// Simulates n scenarios (plus validation if requested), writes one file per
// sequence and a manifest with an 80/20 train/test split by sequence index.
// NormStats are computed on the training split only.
Manifest build_corpus(const CorpusConfig& cfg);

void write_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

// One supervised example: a (T, H, W, C) window and the next-step front.
struct TrainingInstance {
  Tensor window;
  Field2D label;
};

// Window of frames t0-(T-1) .. t0; slots before frame 0 replicate frame 0.
// Label is the front at t0+1. Values are in physical units.
TrainingInstance window_instance(const FireSequence& seq, int t0, int window,
                                 const std::vector<std::string>& channels);

void normalize_window(Tensor& window, const NormStats& stats,
                      const std::vector<std::string>& channels);
void normalize_instance(TrainingInstance& inst, const NormStats& stats,
                        const std::vector<std::string>& channels);

}  // namespace embr
