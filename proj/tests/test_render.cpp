#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "embr/render.hpp"

using namespace embr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// parses "P5\n<w> <h>\n255\n" or the P6 equivalent; returns payload offset
size_t parse_header(const std::string& bytes, const std::string& magic, int* w,
                    int* h) {
  REQUIRE(bytes.substr(0, magic.size()) == magic);
  std::istringstream is(bytes);
  std::string m;
  int maxval = 0;
  is >> m >> *w >> *h >> maxval;
  CHECK(maxval == 255);
  is.get();  // the single whitespace before the payload
  return static_cast<size_t>(is.tellg());
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("embr_render_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("write_pgm: P5 header, min-max scaling, constant is black") {
  const fs::path dir = temp_dir("pgm");
  Field2D f(2, 3, 0.0);
  f.at(0, 0) = 1.0;
  f.at(1, 2) = 0.5;
  const std::string path = (dir / "a.pgm").string();
  write_pgm(path, f);

  const std::string bytes = slurp(path);
  int w = 0, h = 0;
  const size_t off = parse_header(bytes, "P5", &w, &h);
  CHECK(w == 3);
  CHECK(h == 2);
  REQUIRE(bytes.size() == off + 6);  // one byte per pixel
  CHECK(static_cast<unsigned char>(bytes[off + 0]) == 255);  // the max
  CHECK(static_cast<unsigned char>(bytes[off + 1]) == 0);    // the min
  CHECK(static_cast<unsigned char>(bytes[off + 5]) == 128);  // 127.5 rounds up

  const std::string flat = (dir / "flat.pgm").string();
  write_pgm(flat, Field2D(2, 2, 7.0));
  const std::string fb = slurp(flat);
  int fw = 0, fh = 0;
  const size_t foff = parse_header(fb, "P5", &fw, &fh);
  for (size_t n = foff; n < fb.size(); ++n)
    CHECK(static_cast<unsigned char>(fb[n]) == 0);
}

TEST_CASE("write_comparison_ppm: triple-wide P6 with signed difference") {
  const fs::path dir = temp_dir("ppm");
  Field2D pred(2, 2, 0.0), truth(2, 2, 0.0);
  pred.at(0, 0) = 1.0;   // overshoot -> red
  truth.at(0, 1) = 1.0;  // miss -> blue
  const std::string path = (dir / "cmp.ppm").string();
  write_comparison_ppm(path, pred, truth);

  const std::string bytes = slurp(path);
  int w = 0, h = 0;
  const size_t off = parse_header(bytes, "P6", &w, &h);
  CHECK(w == 6);  // three 2-wide panels
  CHECK(h == 2);
  REQUIRE(bytes.size() == off + static_cast<size_t>(w) * h * 3);

  auto px = [&](int i, int j, int c) {
    return static_cast<unsigned char>(bytes[off + (i * w + j) * 3 + c]);
  };
  // diff panel starts at column 4: (0,0) overshoots, (0,1) misses
  CHECK(px(0, 4, 0) == 255);  // red channel
  CHECK(px(0, 4, 2) == 0);
  CHECK(px(0, 5, 2) == 255);  // blue channel
  CHECK(px(0, 5, 0) == 0);
  CHECK(px(1, 4, 0) == 0);  // equal cells stay black
  CHECK(px(1, 4, 1) == 0);

  CHECK_THROWS_AS(
      write_comparison_ppm((dir / "bad.ppm").string(), pred, Field2D(3, 3, 0.0)),
      Error);
}

TEST_CASE("render_sequence writes one frame per step") {
  const fs::path dir = temp_dir("seq");
  FireSequence seq;
  seq.density = Field2D(3, 3, 1.0);
  seq.altitude = Field2D(3, 3, 0.0);
  seq.moisture = Field2D(3, 3, 0.0);
  seq.frames.resize(4);
  for (auto& fr : seq.frames) {
    fr.front = Field2D(3, 3, 0.0);
    fr.scar = Field2D(3, 3, 0.0);
    fr.fuel = Field2D(3, 3, 1.0);
  }
  const std::string out = (dir / "frames").string();
  render_sequence(seq, "front", out);
  for (int t = 0; t < 4; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.pgm", t);
    CHECK(fs::exists(fs::path(out) / name));
  }
  CHECK_THROWS_AS(render_sequence(seq, "heat", out), Error);
}
