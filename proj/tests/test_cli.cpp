// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "qilab/commands.hpp"
#include "qilab/io.hpp"

using namespace qilab;
namespace fs = std::filesystem;

namespace {

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) {
    path = fs::temp_directory_path() / name;
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

const char* kSmallConfig = R"({
  "state": {"alpha": 0.70710678118654752, "beta": 0.70710678118654752,
            "phi": 0.0,
            "spm1": {"family": "LG", "l": 1, "waist": 1.0},
            "spm2": {"family": "LG", "l": -1, "waist": 1.0}},
  "grid": {"nx": 128, "ny": 128, "extent": 4.0},
  "camera": {"psf_sigma": 0.8, "gain_mu": 7.0, "readout_mean": 20.0,
             "readout_sigma": 1.0, "accidental_ratio": 200.0},
  "run": {"photons_per_image": 2000, "frames": 2, "calibration_frames": 40,
          "calibration_photons_per_frame": 30, "calibration_n_max": 200}
})";

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("PGM round trip preserves every pixel") {
  TmpDir d("qilab_pgm_rt");
  std::vector<std::uint16_t> data(64 * 32);
  for (size_t k = 0; k < data.size(); ++k)
    data[k] = static_cast<std::uint16_t>((k * 257 + 11) % 65536);
  auto p = (d.path / "t.pgm").string();
  write_pgm16(p, 64, 32, data);
  Frame f = read_pgm16(p);
  CHECK(f.width == 64);
  CHECK(f.height == 32);
  CHECK(f.counts == data);
  CHECK_THROWS_AS(read_pgm16((d.path / "missing.pgm").string()), IoError);
}

TEST_CASE("complex field IO round trip") {
  TmpDir d("qilab_cf_rt");
  GridSpec g{64, 64, 3.0};
  auto f = lg_field(2, 1, 0.9, g);
  auto p = (d.path / "field.raw").string();
  write_complex_field(p, f, 0.9);
  auto back = read_complex_field(p);
  CHECK(back.grid.nx == 64);
  CHECK(back.grid.extent == doctest::Approx(3.0));
  double dmax = 0.0;
  for (size_t k = 0; k < f.a.size(); ++k)
    dmax = std::max(dmax, std::abs(f.a[k] - back.a[k]));
  CHECK(dmax == 0.0);
}

TEST_CASE("config parsing rejects unknown keys and bad values") {
  CHECK_NOTHROW(ExperimentConfig::parse(kSmallConfig));
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"stat\": {}}"), ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("{\"run\": {\"photon\": 1}}"),
                  ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::parse("not json"), ValidationError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse("{\"state\": {\"alpha\": 0.9, \"beta\": 0.9}}"),
      ValidationError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse(
          "{\"grid\": {\"nx\": 128}, \"camera\": {\"nx\": 256}}"),
      ValidationError);
  // config hash is stable and sensitive
  auto c1 = ExperimentConfig::parse(kSmallConfig);
  auto c2 = ExperimentConfig::parse(kSmallConfig);
  CHECK(c1.hash() == c2.hash());
  c2.photons_per_image += 1;
  CHECK(c1.hash() != c2.hash());
}

TEST_CASE("simulate writes frames, darks, and metadata") {
  TmpDir d("qilab_sim");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  cmd_simulate(cfg, 77, d.str());
  for (const char* t : {"D", "A", "R", "L"}) {
    CHECK(fs::exists(d.path / (std::string("frame_") + t + "_000.pgm")));
    CHECK(fs::exists(d.path / (std::string("frame_") + t + "_001.pgm")));
    CHECK(fs::exists(d.path / (std::string("frame_") + t + "_000.pgm.json")));
  }
  CHECK(fs::exists(d.path / "dark_000.pgm"));
  CHECK(fs::exists(d.path / "dark_009.pgm"));
  CHECK(fs::exists(d.path / "run_meta.json"));
  Frame f = read_pgm16((d.path / "frame_D_000.pgm").string());
  CHECK(f.width == 128);
  // signal frames carry more light than darks
  Frame dark = read_pgm16((d.path / "dark_000.pgm").string());
  double fs_sum = 0.0, dk_sum = 0.0;
  for (auto v : f.counts) fs_sum += v;
  for (auto v : dark.counts) dk_sum += v;
  CHECK(fs_sum > dk_sum + 1e5);
}

TEST_CASE("simulate is byte-identical for the same seed") {
  TmpDir d1("qilab_det1"), d2("qilab_det2"), d3("qilab_det3");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  cfg.frames = 1;
  cmd_simulate(cfg, 123, d1.str());
  cmd_simulate(cfg, 123, d2.str());
  cmd_simulate(cfg, 124, d3.str());
  for (const char* n : {"frame_D_000.pgm", "frame_R_000.pgm", "dark_003.pgm"}) {
    CHECK(slurp(d1.path / n) == slurp(d2.path / n));
  }
  CHECK(slurp(d1.path / "frame_D_000.pgm") != slurp(d3.path / "frame_D_000.pgm"));
}

TEST_CASE("full pipeline: simulate, calibrate, analyze") {
  TmpDir sim("qilab_pipe_sim"), cal_sparse("qilab_pipe_sparse"),
      out("qilab_pipe_out");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  cmd_simulate(cfg, 2024, sim.str());

  // sparse frames for the calibration: low flux, same camera
  auto sparse_cfg = cfg;
  // low flux so blobs rarely overlap on the petal annulus
  sparse_cfg.photons_per_image = 8;
  sparse_cfg.frames = 60;
  cmd_simulate(sparse_cfg, 3024, cal_sparse.str());
  auto cal_path = (out.path / "calibration.json").string();
  cmd_calibrate(expand_glob((cal_sparse.path / "frame_*.pgm").string()),
                expand_glob((cal_sparse.path / "dark_*.pgm").string()), cfg,
                99, cal_path);
  CHECK(fs::exists(cal_path));
  auto cal = load_calibration(cal_path);
  CHECK(cal.mu1 > 500.0);  // near exp(7.0 + 0.125)

  auto rep = cmd_analyze(cfg, sim.str(), cal_path, out.str());
  CHECK(fs::exists(out.path / "witness_report.json"));
  for (const char* t : {"D", "A", "R", "L"})
    CHECK(fs::exists(out.path / (std::string("bins_") + t + ".csv")));
  CHECK(rep.W > 1.0);
  CHECK(rep.W < 2.05);

  nlohmann::json j;
  std::ifstream(out.path / "witness_report.json") >> j;
  CHECK(j.at("W").get<double>() == doctest::Approx(rep.W));
  CHECK(j.contains("sigma_W"));
  CHECK(j.contains("violation_sigmas"));
  CHECK(j.at("vis").contains("DA"));
  CHECK(j.at("vis").contains("RL"));
  CHECK(j.contains("gamma1_deg"));
  CHECK(j.at("l").get<int>() == 1);
  CHECK(j.contains("config_hash"));
}

TEST_CASE("calibrate with an empty glob fails cleanly") {
  TmpDir d("qilab_cal_empty");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  CHECK_THROWS_AS(
      cmd_calibrate({}, {}, cfg, 1, (d.path / "cal.json").string()),
      ValidationError);
}

TEST_CASE("noiseless equator scan reports the expected rotation") {
  TmpDir d("qilab_scan");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  cfg.scan_steps = 9;
  cfg.scan_noiseless = true;
  cmd_scan(cfg, 5, d.str());
  CHECK(fs::exists(d.path / "scan_summary.json"));
  nlohmann::json j;
  std::ifstream(d.path / "scan_summary.json") >> j;
  CHECK(j.at("expected_rotation_deg").get<double>() == doctest::Approx(180.0));
  CHECK(j.at("total_rotation_deg").get<double>() ==
        doctest::Approx(180.0).epsilon(0.01));
  CHECK(fs::exists(d.path / "scan_000.pgm"));
  CHECK(fs::exists(d.path / "scan_008.pgm"));
}

TEST_CASE("render produces a petal image with a dark core") {
  TmpDir d("qilab_render");
  auto cfg = ExperimentConfig::parse(kSmallConfig);
  auto out = (d.path / "render.pgm").string();
  cmd_render(cfg, "D", false, "", out);
  Frame f = read_pgm16(out);
  REQUIRE(f.width == 128);
  std::uint16_t vmax = 0;
  for (auto v : f.counts) vmax = std::max(vmax, v);
  CHECK(vmax == 65535);  // full scale
  CHECK(f.at(64, 64) < 0.02 * 65535);  // vortex core stays dark
  CHECK_THROWS_AS(cmd_render(cfg, "Q", false, "", out), ValidationError);
}
