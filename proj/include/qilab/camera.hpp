// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qilab/grid.hpp"

namespace qilab {

// Gated intensified-camera model. Gain is the total signal (counts) a
// single photon deposits, drawn log-normal; the deposit is spread as a
// Gaussian blob because the intensifier channels are coarser than the CCD
// pixels. Accidental events (intensifier thermal noise, phosphor
// afterglow) are uniform in space with the same gain law.
struct CameraConfig {
  int nx = 1024;
  int ny = 1024;
  double pixel_pitch_um = 13.0;
  double qe = 0.03;       // at 810 nm
  double gate_ns = 5.0;
  double psf_sigma = 1.5;       // blob sigma, pixels
  double gain_mu = 8.7;         // log-normal parameters of per-photon signal
  double gain_sigma = 0.5;
  double readout_mean = 100.0;  // counts/pixel
  double readout_sigma = 4.0;
  double accidental_ratio = 75.0;  // signal events : accidental events
  int saturation = 65535;

  void validate() const;
  // expected photons on the chip for t seconds of acquisition at the given
  // heralded pair rate (pairs/s)
  double photons_for(double pair_rate, double seconds) const {
    return pair_rate * qe * seconds;
  }
};

struct FrameMeta {
  std::uint64_t seed = 0;
  std::string exposure;  // free-form descriptor
  int dropped = 0;       // photons outside the frame
  long clamped = 0;      // pixels clipped at saturation or zero
};

// One gated exposure.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> counts;
  FrameMeta meta;

  std::uint16_t at(int ix, int iy) const {
    return counts[static_cast<size_t>(iy) * width + ix];
  }
};

struct Photon {
  double x, y;  // subpixel position, pixel coordinates
};

// Draws Poisson(n_expected) arrival positions i.i.d. from `density`
// (inverse-CDF over pixels, uniform subpixel jitter).
std::vector<Photon> sample_photons(const ScalarField& density,
                                   double n_expected, std::uint64_t seed);

// Full exposure: per-photon log-normal gain deposited as Gaussian blobs,
// accidentals with mean photons.size()/accidental_ratio, per-pixel readout
// noise, rounding and clamping to [0, saturation].
Frame expose(std::span<const Photon> photons, const CameraConfig& cfg,
             std::uint64_t seed);

// Wrong-delay exposure: no signal photons; accidentals scaled from the
// signal level the right delay would have had.
Frame dark_frame(const CameraConfig& cfg, double expected_signal_photons,
                 std::uint64_t seed);

}  // namespace qilab
