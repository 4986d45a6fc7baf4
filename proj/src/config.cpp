// SPDX-License-Identifier: Apache-2.0
#include "qilab/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace qilab {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ValidationError("config: unknown key '" + it.key() + "' in " +
                            where);
}

ModeSpec parse_mode(const json& j, const std::string& where) {
  ModeSpec m;
  std::string family = j.at("family").get<std::string>();
  if (family == "LG") {
    reject_unknown(j, {"family", "l", "p", "waist"}, where);
    m.family = ModeFamily::LG;
    m.l = j.at("l").get<int>();
    m.p = j.value("p", 0);
  } else if (family == "HG") {
    reject_unknown(j, {"family", "n", "m", "waist"}, where);
    m.family = ModeFamily::HG;
    m.n = j.at("n").get<int>();
    m.m = j.at("m").get<int>();
  } else if (family == "IG") {
    reject_unknown(j, {"family", "p", "m", "parity", "epsilon", "waist"},
                   where);
    m.family = ModeFamily::IG;
    m.ig_p = j.at("p").get<int>();
    m.ig_m = j.at("m").get<int>();
    std::string par = j.at("parity").get<std::string>();
    if (par == "even")
      m.parity = InceParity::Even;
    else if (par == "odd")
      m.parity = InceParity::Odd;
    else
      throw ValidationError("config: parity must be 'even' or 'odd'");
    m.epsilon = j.at("epsilon").get<double>();
  } else {
    throw ValidationError("config: unknown mode family '" + family + "'");
  }
  m.waist = j.value("waist", 1.0);
  m.validate();
  return m;
}

json mode_to_json(const ModeSpec& m) {
  json j;
  switch (m.family) {
    case ModeFamily::LG:
      j = {{"family", "LG"}, {"l", m.l}, {"p", m.p}};
      break;
    case ModeFamily::HG:
      j = {{"family", "HG"}, {"n", m.n}, {"m", m.m}};
      break;
    case ModeFamily::IG:
      j = {{"family", "IG"},
           {"p", m.ig_p},
           {"m", m.ig_m},
           {"parity", m.parity == InceParity::Even ? "even" : "odd"},
           {"epsilon", m.epsilon}};
      break;
  }
  j["waist"] = m.waist;
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"state", "grid", "camera", "run", "analysis", "output"},
                 "top level");
  ExperimentConfig cfg;

  if (j.contains("state")) {
    const json& s = j["state"];
    reject_unknown(s, {"alpha", "beta", "phi", "spm1", "spm2"}, "state");
    cfg.state.alpha = s.value("alpha", 1.0 / std::sqrt(2.0));
    cfg.state.beta = s.value("beta", 1.0 / std::sqrt(2.0));
    cfg.state.phi = s.value("phi", 0.0);
    if (s.contains("spm1")) cfg.state.spm1 = parse_mode(s["spm1"], "spm1");
    if (s.contains("spm2")) cfg.state.spm2 = parse_mode(s["spm2"], "spm2");
  } else {
    cfg.state.alpha = cfg.state.beta = 1.0 / std::sqrt(2.0);
  }
  if (!j.contains("state") || !j["state"].contains("spm1")) {
    cfg.state.spm1.family = ModeFamily::LG;
    cfg.state.spm1.l = 1;
  }
  if (!j.contains("state") || !j["state"].contains("spm2")) {
    cfg.state.spm2.family = ModeFamily::LG;
    cfg.state.spm2.l = -1;
  }

  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown(g, {"nx", "ny", "extent", "x0", "y0"}, "grid");
    cfg.grid.nx = g.value("nx", 512);
    cfg.grid.ny = g.value("ny", 512);
    cfg.grid.extent = g.value("extent", 4.0);
    cfg.grid.x0 = g.value("x0", 0.0);
    cfg.grid.y0 = g.value("y0", 0.0);
  }
  cfg.grid.validate();

  if (j.contains("camera")) {
    const json& c = j["camera"];
    reject_unknown(c,
                   {"nx", "ny", "pixel_pitch_um", "qe", "gate_ns", "psf_sigma",
                    "gain_mu", "gain_sigma", "readout_mean", "readout_sigma",
                    "accidental_ratio", "saturation"},
                   "camera");
    cfg.camera.nx = c.value("nx", cfg.grid.nx);
    cfg.camera.ny = c.value("ny", cfg.grid.ny);
    cfg.camera.pixel_pitch_um = c.value("pixel_pitch_um", 13.0);
    cfg.camera.qe = c.value("qe", 0.03);
    cfg.camera.gate_ns = c.value("gate_ns", 5.0);
    cfg.camera.psf_sigma = c.value("psf_sigma", 1.5);
    cfg.camera.gain_mu = c.value("gain_mu", 8.7);
    cfg.camera.gain_sigma = c.value("gain_sigma", 0.5);
    cfg.camera.readout_mean = c.value("readout_mean", 100.0);
    cfg.camera.readout_sigma = c.value("readout_sigma", 4.0);
    cfg.camera.accidental_ratio = c.value("accidental_ratio", 75.0);
    cfg.camera.saturation = c.value("saturation", 65535);
  } else {
    cfg.camera.nx = cfg.grid.nx;
    cfg.camera.ny = cfg.grid.ny;
  }
  cfg.camera.validate();
  if (cfg.camera.nx != cfg.grid.nx || cfg.camera.ny != cfg.grid.ny)
    throw ValidationError("config: camera and grid pixel counts must match");

  if (j.contains("run")) {
    const json& r = j["run"];
    reject_unknown(r,
                   {"photons_per_image", "frames", "seed", "scan_steps",
                    "scan_path", "scan_noiseless", "calibration_frames",
                    "calibration_photons_per_frame", "calibration_n_max"},
                   "run");
    cfg.photons_per_image = r.value("photons_per_image", 5800.0);
    cfg.frames = r.value("frames", 1);
    if (r.contains("seed")) {
      cfg.seed = r["seed"].get<std::uint64_t>();
      cfg.has_seed = true;
    }
    cfg.scan_steps = r.value("scan_steps", 36);
    cfg.scan_path = r.value("scan_path", std::string("equator"));
    cfg.scan_noiseless = r.value("scan_noiseless", false);
    cfg.calibration_frames = r.value("calibration_frames", 120);
    cfg.calibration_photons_per_frame =
        r.value("calibration_photons_per_frame", 50);
    cfg.calibration_n_max = r.value("calibration_n_max", 2000);
  }
  if (cfg.photons_per_image < 0)
    throw ValidationError("config: photons_per_image must be >= 0");
  if (cfg.frames < 1) throw ValidationError("config: frames must be >= 1");
  if (cfg.scan_steps < 1)
    throw ValidationError("config: scan_steps must be >= 1");
  if (cfg.scan_path != "equator" && cfg.scan_path != "meridian")
    throw ValidationError("config: scan_path must be equator or meridian");

  if (j.contains("analysis")) {
    const json& a = j["analysis"];
    reject_unknown(a,
                   {"bin_width_deg", "r_min_w", "r_max_w", "estimator",
                    "injected_visibility", "center_x", "center_y"},
                   "analysis");
    cfg.bin_width_deg = a.value("bin_width_deg", 0.0);
    cfg.r_min_w = a.value("r_min_w", 0.3);
    cfg.r_max_w = a.value("r_max_w", 3.0);
    cfg.estimator = a.value("estimator", std::string("projection"));
    cfg.injected_visibility = a.value("injected_visibility", -1.0);
    if (a.contains("center_x")) cfg.center_x = a["center_x"].get<double>();
    if (a.contains("center_y")) cfg.center_y = a["center_y"].get<double>();
  }
  if (cfg.estimator != "projection" && cfg.estimator != "minmax")
    throw ValidationError("config: estimator must be projection or minmax");
  if (!(cfg.r_max_w > cfg.r_min_w) || cfg.r_min_w < 0)
    throw ValidationError("config: bad radial window");

  if (j.contains("output")) {
    const json& o = j["output"];
    reject_unknown(o, {"dir"}, "output");
    cfg.out_dir = o.value("dir", std::string("out"));
  }

  cfg.state.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse(text);
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["state"] = {{"alpha", state.alpha},
                {"beta", state.beta},
                {"phi", state.phi},
                {"spm1", mode_to_json(state.spm1)},
                {"spm2", mode_to_json(state.spm2)}};
  j["grid"] = {{"nx", grid.nx},
               {"ny", grid.ny},
               {"extent", grid.extent},
               {"x0", grid.x0},
               {"y0", grid.y0}};
  j["camera"] = {{"nx", camera.nx},
                 {"ny", camera.ny},
                 {"pixel_pitch_um", camera.pixel_pitch_um},
                 {"qe", camera.qe},
                 {"gate_ns", camera.gate_ns},
                 {"psf_sigma", camera.psf_sigma},
                 {"gain_mu", camera.gain_mu},
                 {"gain_sigma", camera.gain_sigma},
                 {"readout_mean", camera.readout_mean},
                 {"readout_sigma", camera.readout_sigma},
                 {"accidental_ratio", camera.accidental_ratio},
                 {"saturation", camera.saturation}};
  j["run"] = {{"photons_per_image", photons_per_image},
              {"frames", frames},
              {"scan_steps", scan_steps},
              {"scan_path", scan_path},
              {"scan_noiseless", scan_noiseless},
              {"calibration_frames", calibration_frames},
              {"calibration_photons_per_frame", calibration_photons_per_frame},
              {"calibration_n_max", calibration_n_max}};
  j["analysis"] = {{"bin_width_deg", bin_width_deg},
                   {"r_min_w", r_min_w},
                   {"r_max_w", r_max_w},
                   {"estimator", estimator},
                   {"injected_visibility", injected_visibility}};
  return j.dump();
}

std::uint64_t ExperimentConfig::hash() const {
  return fnv1a64(canonical_json());
}

}  // namespace qilab
