// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "qilab/camera.hpp"

namespace qilab {

// Per-pixel readout background estimated from wrong-delay frames.
struct BackgroundModel {
  int width = 0;
  int height = 0;
  std::vector<double> mean;
  std::vector<double> sigma_px;  // per-pixel sigma (filled when >= 10 frames)
  double sigma_global = 0.0;
  bool has_per_pixel = false;

  double sigma_at(size_t k, bool per_pixel) const {
    return (per_pixel && has_per_pixel) ? sigma_px[k] : sigma_global;
  }
};

// One extracted photon blob: a connected component of pixels above
// background containing at least one 5-sigma seed.
struct PhotonEvent {
  std::vector<int> pixels;  // flat indices
  double signal = 0.0;      // background-subtracted sum over the component
  double cx = 0.0, cy = 0.0;
};

struct CalibrateOptions {
  int n_max = 10000;     // largest tabulated photon number
  int mc_runs = 50000;   // Monte-Carlo runs per photon number
  std::uint64_t seed = 1;
  int min_events = 1000;
  int warn_events = 5000;
};

// Signal -> photon-number calibration: mean single-photon signal, fitted
// log-normal gain law, and the Monte-Carlo sigma(n) lookup table.
struct Calibration {
  double mu1 = 0.0;
  double log_mu = 0.0;     // fitted log-normal parameters
  double log_sigma = 0.0;
  std::vector<double> sigma_lookup;  // sigma of the n-photon signal, n = 1..N
  std::vector<double> mc_mean;       // MC mean of the n-photon signal
  long n_events_used = 0;
  std::uint64_t seed = 0;
  bool low_statistics = false;

  double sigma_signal(long n) const;  // extrapolates sqrt(n) beyond the table
};

struct PhotonCount {
  long n = 0;
  double err = 0.0;  // photon units
};

enum class SigmaMode { Global, PerPixel };

// Per-pixel mean over >= 2 frames; sigma from pooled per-pixel sample
// variance (global fallback below 10 frames). Sigma is floored at a small
// positive value.
BackgroundModel estimate_background(std::span<const Frame> dark_frames);

// 5-sigma seeded extraction: seed pixels exceed background by 5 sigma;
// components grow 8-connected over pixels more than 1 sigma above
// background, and each component with a seed becomes one event.
std::vector<PhotonEvent> extract_events(const Frame& frame,
                                        const BackgroundModel& bg,
                                        SigmaMode mode = SigmaMode::Global);

Calibration calibrate(std::span<const double> event_signals,
                      const CalibrateOptions& opts = {});
Calibration calibrate(std::span<const PhotonEvent> events,
                      const CalibrateOptions& opts = {});

// n = round(signal / mu1), error from the sigma(n) lookup in photon units.
PhotonCount signal_to_photons(double region_signal, const Calibration& cal);

void save_calibration(const Calibration& cal, const std::string& path);
Calibration load_calibration(const std::string& path);

}  // namespace qilab
