#include "embr/render.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "embr/errors.hpp"

namespace embr {

namespace {

unsigned char scale(double v, double lo, double hi) {
  if (hi - lo <= 0.0) return 0;
  const double t = (v - lo) / (hi - lo);
  return static_cast<unsigned char>(std::clamp(t, 0.0, 1.0) * 255.0 + 0.5);
}

}  // namespace

void write_pgm(const std::string& path, const Field2D& field) {
  double lo = field[0], hi = field[0];
  for (size_t n = 0; n < field.size(); ++n) {
    lo = std::min(lo, field[n]);
    hi = std::max(hi, field[n]);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  os << "P5\n" << field.cols() << " " << field.rows() << "\n255\n";
  std::vector<unsigned char> row(field.cols());
  for (int i = 0; i < field.rows(); ++i) {
    for (int j = 0; j < field.cols(); ++j) row[j] = scale(field.at(i, j), lo, hi);
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

void write_comparison_ppm(const std::string& path, const Field2D& pred,
                          const Field2D& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
    throw Error(ErrorKind::Numeric, "comparison: shape mismatch");
  double lo = std::min(pred[0], truth[0]), hi = std::max(pred[0], truth[0]);
  double dmax = 0.0;
  for (size_t n = 0; n < pred.size(); ++n) {
    lo = std::min({lo, pred[n], truth[n]});
    hi = std::max({hi, pred[n], truth[n]});
    dmax = std::max(dmax, std::abs(pred[n] - truth[n]));
  }
  const int h = pred.rows(), w = pred.cols();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  os << "P6\n" << 3 * w << " " << h << "\n255\n";
  std::vector<unsigned char> row(static_cast<size_t>(3 * w) * 3);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const unsigned char p = scale(pred.at(i, j), lo, hi);
      const unsigned char t = scale(truth.at(i, j), lo, hi);
      row[3 * j] = row[3 * j + 1] = row[3 * j + 2] = p;
      row[3 * (w + j)] = row[3 * (w + j) + 1] = row[3 * (w + j) + 2] = t;
      // red: fire predicted where there was none; blue: fire missed
      const double d = pred.at(i, j) - truth.at(i, j);
      const unsigned char mag =
          dmax > 0.0 ? scale(std::abs(d), 0.0, dmax) : 0;
      unsigned char* px = &row[3 * (2 * w + j)];
      px[0] = d > 0.0 ? mag : 0;
      px[1] = 0;
      px[2] = d < 0.0 ? mag : 0;
    }
    os.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!os) throw Error(ErrorKind::Io, "write failed: " + path);
}

void render_sequence(const FireSequence& seq, const std::string& channel,
                     const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (int t = 0; t < seq.steps(); ++t) {
    const FireFrame& fr = seq.frames[t];
    const Field2D* plane = nullptr;
    if (channel == "front") plane = &fr.front;
    else if (channel == "scar") plane = &fr.scar;
    else if (channel == "fuel") plane = &fr.fuel;
    else throw Error(ErrorKind::Usage, "render: unknown channel " + channel);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.pgm", t);
    write_pgm((std::filesystem::path(out_dir) / name).string(), *plane);
  }
}

}  // namespace embr
