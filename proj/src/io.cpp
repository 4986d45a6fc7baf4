// SPDX-License-Identifier: Apache-2.0
#include "qilab/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace qilab {

static_assert(std::endian::native == std::endian::little,
              "raw float64 export assumes a little-endian host");

void write_pgm16(const std::string& path, int width, int height,
                 std::span<const std::uint16_t> data) {
  if (static_cast<size_t>(width) * height != data.size())
    throw ValidationError("write_pgm16: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  std::vector<unsigned char> buf(data.size() * 2);
  for (size_t k = 0; k < data.size(); ++k) {
    buf[2 * k] = static_cast<unsigned char>(data[k] >> 8);
    buf[2 * k + 1] = static_cast<unsigned char>(data[k] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

Frame read_pgm16(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("not a P5 PGM: " + path);
  // skip whitespace and comment lines
  auto next_token = [&]() {
    std::string tok;
    for (;;) {
      in >> tok;
      if (!in) throw IoError("truncated PGM header: " + path);
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
  };
  int width = std::stoi(next_token());
  int height = std::stoi(next_token());
  int maxval = std::stoi(next_token());
  if (maxval != 65535) throw IoError("expected 16-bit PGM: " + path);
  in.get();  // single whitespace after maxval
  Frame f;
  f.width = width;
  f.height = height;
  f.counts.resize(static_cast<size_t>(width) * height);
  std::vector<unsigned char> buf(f.counts.size() * 2);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!in) throw IoError("truncated PGM data: " + path);
  for (size_t k = 0; k < f.counts.size(); ++k)
    f.counts[k] =
        static_cast<std::uint16_t>((buf[2 * k] << 8) | buf[2 * k + 1]);
  return f;
}

void write_frame(const std::string& path_pgm, const Frame& frame,
                 std::uint64_t config_hash) {
  write_pgm16(path_pgm, frame.width, frame.height, frame.counts);
  nlohmann::json j;
  j["seed"] = frame.meta.seed;
  j["config_hash"] = config_hash;
  j["exposure"] = frame.meta.exposure;
  j["dropped"] = frame.meta.dropped;
  j["clamped"] = frame.meta.clamped;
  std::ofstream out(path_pgm + ".json");
  if (!out) throw IoError("cannot write " + path_pgm + ".json");
  out << j.dump(2) << "\n";
}

void write_scalar_pgm(const std::string& path, const ScalarField& f) {
  double vmax = 0.0;
  for (double v : f.v) vmax = std::max(vmax, v);
  std::vector<std::uint16_t> px(f.v.size(), 0);
  if (vmax > 0.0)
    for (size_t k = 0; k < f.v.size(); ++k)
      px[k] = static_cast<std::uint16_t>(
          std::lround(std::clamp(f.v[k] / vmax, 0.0, 1.0) * 65535.0));
  write_pgm16(path, f.grid.nx, f.grid.ny, px);
}

void write_complex_field(const std::string& path_raw, const ComplexField& f,
                         double waist) {
  std::ofstream out(path_raw, std::ios::binary);
  if (!out) throw IoError("cannot write " + path_raw);
  std::vector<double> plane(f.a.size());
  for (size_t k = 0; k < f.a.size(); ++k) plane[k] = f.a[k].real();
  out.write(reinterpret_cast<const char*>(plane.data()),
            static_cast<std::streamsize>(plane.size() * sizeof(double)));
  for (size_t k = 0; k < f.a.size(); ++k) plane[k] = f.a[k].imag();
  out.write(reinterpret_cast<const char*>(plane.data()),
            static_cast<std::streamsize>(plane.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + path_raw);
  nlohmann::json j;
  j["nx"] = f.grid.nx;
  j["ny"] = f.grid.ny;
  j["extent"] = f.grid.extent;
  j["waist"] = waist;
  std::ofstream side(path_raw + ".json");
  if (!side) throw IoError("cannot write " + path_raw + ".json");
  side << j.dump(2) << "\n";
}

ComplexField read_complex_field(const std::string& path_raw) {
  std::ifstream side(path_raw + ".json");
  if (!side) throw IoError("cannot read " + path_raw + ".json");
  nlohmann::json j;
  side >> j;
  ComplexField f;
  f.grid.nx = j.at("nx").get<int>();
  f.grid.ny = j.at("ny").get<int>();
  f.grid.extent = j.at("extent").get<double>();
  f.grid.validate();
  size_t n = static_cast<size_t>(f.grid.nx) * f.grid.ny;
  std::ifstream in(path_raw, std::ios::binary);
  if (!in) throw IoError("cannot read " + path_raw);
  std::vector<double> re(n), im(n);
  in.read(reinterpret_cast<char*>(re.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  in.read(reinterpret_cast<char*>(im.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("truncated field data: " + path_raw);
  f.a.resize(n);
  for (size_t k = 0; k < n; ++k) f.a[k] = cplx(re[k], im[k]);
  return f;
}

}  // namespace qilab
