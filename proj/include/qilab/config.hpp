// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "qilab/state.hpp"
#include "qilab/witness.hpp"

namespace qilab {

// Full scenario description loaded from JSON. Unknown keys are rejected;
// all module invariants are validated at load time.
struct ExperimentConfig {
  HybridState state;
  GridSpec grid;
  CameraConfig camera;

  // run section
  double photons_per_image = 5800.0;
  int frames = 1;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int scan_steps = 36;
  std::string scan_path = "equator";  // equator | meridian | custom
  std::vector<PolarizationState> scan_custom;
  bool scan_noiseless = false;
  int calibration_frames = 120;
  int calibration_photons_per_frame = 50;
  int calibration_n_max = 2000;

  // analysis section
  double bin_width_deg = 0.0;  // 0 -> 22.5/l
  double r_min_w = 0.3;
  double r_max_w = 3.0;
  std::string estimator = "projection";
  double injected_visibility = -1.0;
  std::optional<double> center_x, center_y;  // pixels; default frame center

  std::string out_dir = "out";

  std::uint64_t hash() const;
  std::string canonical_json() const;

  static ExperimentConfig load(const std::string& path);
  static ExperimentConfig parse(const std::string& json_text);
};

}  // namespace qilab
