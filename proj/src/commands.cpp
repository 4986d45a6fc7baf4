// SPDX-License-Identifier: Apache-2.0
#include "qilab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "qilab/io.hpp"

namespace fs = std::filesystem;

namespace qilab {

namespace {

std::string frame_name(const std::string& trigger, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame_%s_%03d.pgm", trigger.c_str(), i);
  return buf;
}

PolarizationState trigger_by_name(const std::string& name) {
  if (name == "H") return PolarizationState::H();
  if (name == "V") return PolarizationState::V();
  if (name == "D") return PolarizationState::D();
  if (name == "A") return PolarizationState::A();
  if (name == "R") return PolarizationState::R();
  if (name == "L") return PolarizationState::L();
  throw ValidationError("unknown trigger polarization '" + name + "'");
}

bool is_lg_pair(const HybridState& s, int* l_out) {
  if (s.spm1.family == ModeFamily::LG && s.spm2.family == ModeFamily::LG &&
      s.spm1.l == -s.spm2.l && std::abs(s.spm1.l) >= 1) {
    if (l_out) *l_out = std::abs(s.spm1.l);
    return true;
  }
  return false;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
}

}  // namespace

std::vector<std::string> expand_glob(const std::string& pattern) {
  fs::path p(pattern);
  std::string stem = p.filename().string();
  fs::path dir = p.parent_path();
  if (dir.empty()) dir = ".";
  if (stem.find('*') == std::string::npos) {
    if (fs::exists(p)) return {pattern};
    return {};
  }
  size_t star = stem.find('*');
  std::string pre = stem.substr(0, star), post = stem.substr(star + 1);
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.size() >= pre.size() + post.size() &&
        name.compare(0, pre.size(), pre) == 0 &&
        name.compare(name.size() - post.size(), post.size(), post) == 0)
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScalarField heralded_density(const HybridState& state,
                             const PolarizationState& trigger,
                             const GridSpec& grid, double target_vis,
                             double bin_width_deg, double* probability) {
  HeraldResult h = herald(state, trigger, grid);
  if (probability) *probability = h.probability;
  ScalarField density = intensity(h.field);
  int l = 0;
  if (target_vis >= 0.0 && is_lg_pair(state, &l)) {
    double v_mix =
        std::min(1.0, target_vis / bin_average_factor(l, bin_width_deg));
    if (v_mix < 1.0) {
      ScalarField mix = heralded_mixture(state, grid);
      for (size_t k = 0; k < density.v.size(); ++k)
        density.v[k] = v_mix * density.v[k] + (1.0 - v_mix) * mix.v[k];
      density.normalize_density();
    }
  }
  return density;
}

void cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed,
                  const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::uint64_t chash = cfg.hash();
  const char* names[4] = {"D", "A", "R", "L"};
  const PolarizationState triggers[4] = {
      PolarizationState::D(), PolarizationState::A(), PolarizationState::R(),
      PolarizationState::L()};
  for (int t = 0; t < 4; ++t) {
    double prob = 0.0;
    ScalarField density =
        heralded_density(cfg.state, triggers[t], cfg.grid,
                         cfg.injected_visibility, cfg.bin_width_deg, &prob);
    for (int i = 0; i < cfg.frames; ++i) {
      std::uint64_t fseed = derive_seed(seed, 0x510000 + t * 1000 + i);
      auto photons = sample_photons(
          density, cfg.photons_per_image * prob / 0.5, fseed);
      Frame frame = expose(photons, cfg.camera, derive_seed(fseed, 1));
      frame.meta.exposure = std::string("signal:") + names[t];
      write_frame((fs::path(out_dir) / frame_name(names[t], i)).string(),
                  frame, chash);
    }
  }
  const int n_dark = std::max(10, cfg.frames);
  for (int i = 0; i < n_dark; ++i) {
    Frame d = dark_frame(cfg.camera, 0.0, derive_seed(seed, 0xDA0000 + i));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "dark_%03d.pgm", i);
    write_frame((fs::path(out_dir) / buf).string(), d, chash);
  }
  nlohmann::json meta = {{"seed", seed},
                         {"config_hash", chash},
                         {"frames", cfg.frames},
                         {"dark_frames", n_dark},
                         {"triggers", {"D", "A", "R", "L"}}};
  std::ofstream out(fs::path(out_dir) / "run_meta.json");
  if (!out) throw IoError("cannot write run_meta.json");
  out << meta.dump(2) << "\n";
}

void cmd_calibrate(const std::vector<std::string>& frame_paths,
                   const std::vector<std::string>& dark_paths,
                   const ExperimentConfig& cfg, std::uint64_t seed,
                   const std::string& out_path) {
  if (frame_paths.empty())
    throw ValidationError("calibrate: no input frames matched");
  if (dark_paths.size() < 2)
    throw ValidationError("calibrate: need at least 2 dark frames");
  std::vector<Frame> darks;
  for (const auto& p : dark_paths) darks.push_back(read_pgm16(p));
  BackgroundModel bg = estimate_background(darks);
  std::vector<double> signals;
  for (const auto& p : frame_paths) {
    Frame f = read_pgm16(p);
    for (const auto& ev : extract_events(f, bg)) signals.push_back(ev.signal);
  }
  CalibrateOptions copts;
  copts.n_max = cfg.calibration_n_max;
  copts.seed = seed;
  Calibration cal = calibrate(signals, copts);
  save_calibration(cal, out_path);
}

void write_witness_report(const WitnessReport& rep, const std::string& path) {
  nlohmann::json j;
  j["W"] = rep.W;
  j["sigma_W"] = rep.sigma_W;
  j["violation_sigmas"] = rep.violation_sigmas;
  j["vis"] = {{"DA", {{"v", rep.vis_DA.v}, {"err", rep.vis_DA.err}}},
              {"RL", {{"v", rep.vis_RL.v}, {"err", rep.vis_RL.err}}}};
  j["gamma1_deg"] = rep.gamma1_deg;
  j["gamma2_deg"] = rep.gamma2_deg;
  j["l"] = rep.l;
  j["photons_per_image"] = rep.photons_per_image;
  j["seed"] = rep.seed;
  j["config_hash"] = rep.config_hash;
  j["estimator"] = rep.estimator;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

WitnessReport cmd_analyze(const ExperimentConfig& cfg,
                          const std::string& frames_dir,
                          const std::string& cal_path,
                          const std::string& out_dir) {
  int l = 0;
  if (!is_lg_pair(cfg.state, &l))
    throw ValidationError("analyze: state must pair LG_{+l} with LG_{-l}");
  ensure_dir(out_dir);
  Calibration cal = load_calibration(cal_path);

  auto darks_paths = expand_glob((fs::path(frames_dir) / "dark_*.pgm").string());
  if (darks_paths.size() < 2)
    throw ValidationError("analyze: need dark frames in " + frames_dir);
  std::vector<Frame> darks;
  for (const auto& p : darks_paths) darks.push_back(read_pgm16(p));
  BackgroundModel bg = estimate_background(darks);

  const double px_per_unit = cfg.grid.px_per_unit();
  const double w = cfg.state.spm1.waist;
  const double x0 = cfg.center_x.value_or(cfg.camera.nx / 2.0);
  const double y0 = cfg.center_y.value_or(cfg.camera.ny / 2.0);
  const double r_min = cfg.r_min_w * w * px_per_unit;
  const double r_max = cfg.r_max_w * w * px_per_unit;

  WitnessReport rep;
  rep.l = l;
  rep.photons_per_image = cfg.photons_per_image;
  rep.seed = cfg.seed;
  rep.config_hash = cfg.hash();
  rep.estimator = cfg.estimator;
  const char* names[4] = {"D", "A", "R", "L"};
  std::array<std::vector<Frame>, 4> trig_frames;
  for (int t = 0; t < 4; ++t) {
    auto paths = expand_glob(
        (fs::path(frames_dir) / (std::string("frame_") + names[t] + "_*.pgm"))
            .string());
    if (paths.empty())
      throw ValidationError(std::string("analyze: no frames for trigger ") +
                            names[t]);
    for (const auto& p : paths) trig_frames[t].push_back(read_pgm16(p));
  }
  // center one bin on the D-trigger fringe maximum before binning
  double origin = fringe_origin(trig_frames[0][0], bg, l, x0, y0, r_min, r_max,
                                cfg.bin_width_deg);
  for (int t = 0; t < 4; ++t) {
    rep.histograms[t] = angular_bin(trig_frames[t], bg, cal, l, x0, y0, r_min,
                                    r_max, cfg.bin_width_deg, origin);
    double tot = 0.0;
    for (const auto& pc : rep.histograms[t].counts) tot += pc.n;
    rep.image_photon_totals[t] = tot;
  }
  rep.gamma1_deg = align_gamma1(rep.histograms[0]);
  rep.gamma2_deg =
      std::fmod(rep.gamma1_deg + 45.0 / l, rep.histograms[0].period_deg);
  if (rep.gamma2_deg < 0) rep.gamma2_deg += rep.histograms[0].period_deg;
  std::uint64_t vseed = derive_seed(cfg.seed, 0xA11CE);
  Vis da, rl;
  if (cfg.estimator == "minmax") {
    da = visibility_minmax(rep.histograms[0], rep.histograms[1],
                           derive_seed(vseed, 1));
    rl = visibility_minmax(rep.histograms[2], rep.histograms[3],
                           derive_seed(vseed, 2));
  } else {
    da = visibility(rep.histograms[0], rep.histograms[1], rep.gamma1_deg, l,
                    derive_seed(vseed, 1));
    rl = visibility(rep.histograms[2], rep.histograms[3], rep.gamma2_deg, l,
                    derive_seed(vseed, 2));
  }
  WitnessReport wr = compute_witness(da, rl);
  rep.W = wr.W;
  rep.sigma_W = wr.sigma_W;
  rep.violation_sigmas = wr.violation_sigmas;
  rep.vis_DA = da;
  rep.vis_RL = rl;

  write_witness_report(rep,
                       (fs::path(out_dir) / "witness_report.json").string());
  for (int t = 0; t < 4; ++t) {
    std::ofstream csv(fs::path(out_dir) /
                      (std::string("bins_") + names[t] + ".csv"));
    if (!csv) throw IoError("cannot write bin CSV");
    csv << "bin_center_deg,n,err\n";
    const auto& h = rep.histograms[t];
    for (int b = 0; b < h.nbins(); ++b)
      csv << h.bin_center(b) << "," << h.counts[b].n << "," << h.counts[b].err
          << "\n";
  }
  return rep;
}

void cmd_scan(const ExperimentConfig& cfg, std::uint64_t seed,
              const std::string& out_dir) {
  ensure_dir(out_dir);
  std::vector<PolarizationState> path = cfg.scan_path == "meridian"
                                            ? meridian_path(cfg.scan_steps)
                                            : equator_path(cfg.scan_steps);
  auto points = poincare_scan(cfg.state, path, cfg.grid);
  const std::uint64_t chash = cfg.hash();

  std::vector<ScalarField> images;
  for (size_t k = 0; k < points.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scan_%03d.pgm", static_cast<int>(k));
    std::string out_path = (fs::path(out_dir) / buf).string();
    if (!points[k].image) {
      // degenerate projection: emit an empty frame
      std::vector<std::uint16_t> zeros(
          static_cast<size_t>(cfg.grid.nx) * cfg.grid.ny, 0);
      write_pgm16(out_path, cfg.grid.nx, cfg.grid.ny, zeros);
      continue;
    }
    if (cfg.scan_noiseless) {
      write_scalar_pgm(out_path, *points[k].image);
    } else {
      auto photons = sample_photons(
          *points[k].image,
          cfg.photons_per_image * points[k].probability / 0.5,
          derive_seed(seed, 0x5CA0 + k));
      Frame frame = expose(photons, cfg.camera, derive_seed(seed, 0x5CB0 + k));
      frame.meta.exposure = "scan";
      write_frame(out_path, frame, chash);
    }
    images.push_back(std::move(*points[k].image));
  }

  nlohmann::json summary = {{"seed", seed},
                            {"config_hash", chash},
                            {"path", cfg.scan_path},
                            {"steps", cfg.scan_steps}};
  int l = 0;
  if (is_lg_pair(cfg.state, &l) && images.size() >= 2) {
    const double px_per_unit = cfg.grid.px_per_unit();
    const double w = cfg.state.spm1.waist;
    summary["total_rotation_deg"] = measure_total_rotation(
        images, l, cfg.r_min_w * w, cfg.r_max_w * w);
    summary["expected_rotation_deg"] =
        cfg.scan_path == "equator" ? 180.0 / l : 0.0;
  }
  std::ofstream out(fs::path(out_dir) / "scan_summary.json");
  if (!out) throw IoError("cannot write scan_summary.json");
  out << summary.dump(2) << "\n";
}

void cmd_render(const ExperimentConfig& cfg, const std::string& trigger,
                bool inset, const std::string& frame_in,
                const std::string& out_path) {
  ScalarField theory = heralded_density(cfg.state, trigger_by_name(trigger),
                                        cfg.grid, -1.0, 0.0, nullptr);
  std::vector<std::uint16_t> px;
  int nx, ny;
  if (!frame_in.empty()) {
    Frame f = read_pgm16(frame_in);
    nx = f.width;
    ny = f.height;
    std::uint16_t vmax = 1;
    for (auto c : f.counts) vmax = std::max(vmax, c);
    px.resize(f.counts.size());
    for (size_t k = 0; k < px.size(); ++k)
      px[k] = static_cast<std::uint16_t>(
          std::lround(65535.0 * f.counts[k] / vmax));
  } else {
    nx = cfg.grid.nx;
    ny = cfg.grid.ny;
    double vmax = 0.0;
    for (double v : theory.v) vmax = std::max(vmax, v);
    px.resize(theory.v.size());
    for (size_t k = 0; k < px.size(); ++k)
      px[k] = static_cast<std::uint16_t>(
          std::lround(65535.0 * theory.v[k] / vmax));
  }
  if (inset) {
    // theoretical intensity, downscaled 4x, in the top-left corner
    int inx = theory.grid.nx / 4, iny = theory.grid.ny / 4;
    double vmax = 0.0;
    for (double v : theory.v) vmax = std::max(vmax, v);
    for (int j = 0; j < iny && j < ny; ++j)
      for (int i = 0; i < inx && i < nx; ++i) {
        double acc = 0.0;
        for (int dj = 0; dj < 4; ++dj)
          for (int di = 0; di < 4; ++di)
            acc += theory.at(4 * i + di, 4 * j + dj);
        px[static_cast<size_t>(j) * nx + i] = static_cast<std::uint16_t>(
            std::lround(65535.0 * std::min(1.0, acc / (16.0 * vmax))));
      }
  }
  write_pgm16(out_path, nx, ny, px);
}

}  // namespace qilab
