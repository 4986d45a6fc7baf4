// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>

#include "qilab/counting.hpp"
#include "qilab/state.hpp"

namespace qilab {

// Photon numbers per angular bin, folded by the 360/l periodicity of an
// LG_{+l}/LG_{-l} superposition. Default bin width 22.5/l degrees (16 bins
// per period).
struct AngularHistogram {
  int l = 1;
  double bin_width_deg = 22.5;
  double period_deg = 360.0;
  double origin_deg = 0.0;          // angle where bin 0 starts
  double x0 = 0.0, y0 = 0.0;        // rotation center, pixel coordinates
  double r_min = 0.0, r_max = 0.0;  // radial window, pixels
  std::vector<double> signal;       // background-subtracted counts per bin
  std::vector<PhotonCount> counts;

  int nbins() const { return static_cast<int>(signal.size()); }
  double bin_center(int b) const {
    return origin_deg + (b + 0.5) * bin_width_deg;
  }
  int bin_of(double angle_deg) const;
};

struct Vis {
  double v = 0.0;
  double err = 0.0;
};

struct WitnessReport {
  double W = 0.0;
  double sigma_W = 0.0;
  double violation_sigmas = 0.0;
  Vis vis_DA, vis_RL;
  double gamma1_deg = 0.0, gamma2_deg = 0.0;
  int l = 1;
  double photons_per_image = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string estimator = "projection";
  std::array<double, 4> image_photon_totals{};   // D, A, R, L
  std::array<AngularHistogram, 4> histograms{};  // D, A, R, L
};

// Bins the background-subtracted signal of one or more frames by folded
// angle and converts each bin to a photon number. bin_width_deg == 0
// selects the default 22.5/l.
AngularHistogram angular_bin(std::span<const Frame> frames,
                             const BackgroundModel& bg, const Calibration& cal,
                             int l, double x0, double y0, double r_min,
                             double r_max, double bin_width_deg = 0.0,
                             double origin_deg = 0.0);
AngularHistogram angular_bin(const Frame& frame, const BackgroundModel& bg,
                             const Calibration& cal, int l, double x0,
                             double y0, double r_min, double r_max,
                             double bin_width_deg = 0.0,
                             double origin_deg = 0.0);

// Bin origin that centers one bin on the fringe maximum of the frame,
// from the phase of the 2l angular harmonic of the background-subtracted
// signal. Without this alignment a fringe peaking at a bin edge loses a
// factor cos(l * bin width) of visibility.
double fringe_origin(const Frame& frame, const BackgroundModel& bg, int l,
                     double x0, double y0, double r_min, double r_max,
                     double bin_width_deg);

// Center of the maximal bin of the D-trigger histogram (ties resolve to
// the lowest angle); fixes the angular reference for all projections.
double align_gamma1(const AngularHistogram& hist_D);

// Four-projection visibility: with gamma_perp = gamma + 90/l,
//   vis = [N(P,g) + N(Porth,g_perp) - N(P,g_perp) - N(Porth,g)] / sum.
// Error by Monte-Carlo propagation of the per-bin photon errors.
Vis visibility(const AngularHistogram& hist_P,
               const AngularHistogram& hist_Porth, double gamma_deg, int l,
               std::uint64_t seed, int mc_runs = 20000);

// Alternative estimator: empirical max/min bins of each image.
Vis visibility_minmax(const AngularHistogram& hist_P,
                      const AngularHistogram& hist_Porth, std::uint64_t seed,
                      int mc_runs = 20000);

WitnessReport compute_witness(const Vis& vis_DA, const Vis& vis_RL);

// Visibility loss of a perfect fringe from finite bin averaging:
// sin(l*dtheta)/(l*dtheta) with dtheta the bin width in radians.
double bin_average_factor(int l, double bin_width_deg);

struct ExperimentOptions {
  GridSpec grid{512, 512, 4.0};
  double r_min_w = 0.3;  // radial window, waist units
  double r_max_w = 3.0;
  double bin_width_deg = 0.0;  // 0 -> 22.5/l
  std::string estimator = "projection";
  // target per-basis visibility to inject via a depolarizing mixture;
  // pre-compensated for bin averaging so the recovered visibility matches.
  // < 0 disables (pure state).
  double injected_visibility = -1.0;
  const Calibration* calibration = nullptr;  // built internally when null
  int n_dark_frames = 20;
  int cal_frames = 120;          // synthetic calibration when none is given
  int cal_photons_per_frame = 50;
  int cal_n_max = 2000;
};

// Full simulated measurement: heralded images for D, A, R, L triggers
// through the camera model, angular analysis, and the witness.
// photons_per_image is the expected photon budget for an unbiased
// (probability 1/2) trigger; actual budgets scale with the herald
// probability so projection values are joint probabilities.
WitnessReport run_experiment(const HybridState& state, const CameraConfig& cfg,
                             double photons_per_image, std::uint64_t seed,
                             const ExperimentOptions& opts);

// Builds a calibration from simulated sparse single-photon frames
// (positions kept >= 10 px apart) plus dark frames for the background.
Calibration make_synthetic_calibration(const CameraConfig& cfg,
                                       std::uint64_t seed, int n_frames,
                                       int photons_per_frame,
                                       const CalibrateOptions& copts);

// Signed cumulative pattern rotation (degrees) across a scan sequence,
// by circular cross-correlation of fine angular profiles with parabolic
// peak refinement. Period 180/l degrees per fringe.
double measure_total_rotation(std::span<const ScalarField> images, int l,
                              double r_min, double r_max);

}  // namespace qilab
