// SPDX-License-Identifier: Apache-2.0
//
// qilab: simulate and analyze heralded single-photon imaging of
// hybrid-entangled states with a gated intensified camera.

#include <iostream>

#include "CLI11.hpp"
#include "qilab/commands.hpp"

using namespace qilab;

int main(int argc, char** argv) {
  CLI::App app{"heralded-imaging entanglement laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* sub, bool need_seed) {
    sub->add_option("--config", config_path, "experiment config JSON")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    auto* s = sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t v) {
          seed = v;
          seed_set = true;
        },
        "master RNG seed");
    if (need_seed) s->required();
  };

  auto* sim = app.add_subcommand("simulate", "simulate heralded frames");
  add_common(sim, true);

  auto* cal = app.add_subcommand("calibrate",
                                 "build a signal->photon calibration");
  std::string frames_glob, darks_glob, cal_out = "calibration.json";
  add_common(cal, true);
  cal->add_option("--frames", frames_glob, "sparse single-photon frame glob")
      ->required();
  cal->add_option("--dark", darks_glob, "dark frame glob")->required();
  cal->add_option("--cal-out", cal_out, "output calibration JSON");

  auto* ana = app.add_subcommand("analyze", "angular fringes and witness");
  std::string frames_dir, cal_path;
  add_common(ana, false);
  ana->add_option("--frames-dir", frames_dir, "directory with simulated frames")
      ->required();
  ana->add_option("--calibration", cal_path, "calibration JSON")->required();
  std::string estimator;
  ana->add_option("--estimator", estimator, "projection | minmax")
      ->check(CLI::IsMember({"projection", "minmax"}));

  auto* scan = app.add_subcommand("scan", "Poincare-sphere scan sequence");
  add_common(scan, true);
  bool noiseless = false;
  scan->add_flag("--noiseless", noiseless, "emit noiseless intensities");

  auto* render = app.add_subcommand("render", "render an intensity PGM");
  add_common(render, false);
  std::string trigger = "D", frame_in, render_out = "render.pgm";
  render->add_option("--trigger", trigger, "trigger polarization (H/V/D/A/R/L)");
  render->add_option("--frame", frame_in, "input frame PGM to rescale");
  render->add_option("--render-out", render_out, "output PGM path");
  bool inset = false;
  render->add_flag("--inset", inset, "embed the theoretical intensity inset");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (!seed_set && cfg.has_seed) {
      seed = cfg.seed;
      seed_set = true;
    }
    cfg.seed = seed;

    if (sim->parsed()) {
      cmd_simulate(cfg, seed, out_dir);
    } else if (cal->parsed()) {
      cmd_calibrate(expand_glob(frames_glob), expand_glob(darks_glob), cfg,
                    seed, cal_out);
    } else if (ana->parsed()) {
      if (!estimator.empty()) cfg.estimator = estimator;
      WitnessReport rep = cmd_analyze(cfg, frames_dir, cal_path, out_dir);
      std::cout << "W = " << rep.W << " +- " << rep.sigma_W << " ("
                << rep.violation_sigmas << " sigma above the separable bound)"
                << (rep.W > 1.0 ? " -> entangled" : " -> not entangled")
                << "\n";
    } else if (scan->parsed()) {
      if (noiseless) cfg.scan_noiseless = true;
      cmd_scan(cfg, seed, out_dir);
    } else if (render->parsed()) {
      cmd_render(cfg, trigger, inset, frame_in, render_out);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
