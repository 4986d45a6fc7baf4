// SPDX-License-Identifier: Apache-2.0
#include "qilab/camera.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qilab {

void CameraConfig::validate() const {
  if (nx < 16 || ny < 16) throw ValidationError("camera: nx, ny must be >= 16");
  if (!(qe > 0.0 && qe <= 1.0)) throw ValidationError("camera: qe in (0, 1]");
  if (!(psf_sigma > 0.0)) throw ValidationError("camera: psf_sigma must be > 0");
  if (!(gain_sigma > 0.0))
    throw ValidationError("camera: gain_sigma must be > 0");
  if (!(readout_sigma >= 0.0) || !(readout_mean >= 0.0))
    throw ValidationError("camera: readout noise must be >= 0");
  if (!(accidental_ratio > 0.0))
    throw ValidationError("camera: accidental_ratio must be > 0");
  if (saturation < 1 || saturation > 65535)
    throw ValidationError("camera: saturation out of range");
}

std::vector<Photon> sample_photons(const ScalarField& density,
                                   double n_expected, std::uint64_t seed) {
  if (!density.density)
    throw ValidationError("sample_photons: input is not a probability density");
  if (n_expected < 0.0)
    throw ValidationError("sample_photons: n_expected must be >= 0");
  std::mt19937_64 rng(derive_seed(seed, 0x70686f746f6eULL));
  std::size_t n = 0;
  if (n_expected > 0.0) {
    std::poisson_distribution<long> pois(n_expected);
    n = static_cast<std::size_t>(std::max<long>(0, pois(rng)));
  }
  std::vector<Photon> out;
  out.reserve(n);
  if (n == 0) return out;

  std::vector<double> cdf(density.v.size());
  double acc = 0.0;
  for (size_t k = 0; k < density.v.size(); ++k) {
    acc += std::max(0.0, density.v[k]);
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("sample_photons: zero density");
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int nx = density.grid.nx;
  for (std::size_t i = 0; i < n; ++i) {
    double u = uni(rng) * acc;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    size_t idx = std::min<size_t>(it - cdf.begin(), cdf.size() - 1);
    int ix = static_cast<int>(idx % nx);
    int iy = static_cast<int>(idx / nx);
    out.push_back({ix + uni(rng), iy + uni(rng)});
  }
  return out;
}

namespace {

// integral of a unit Gaussian blob centered at c over pixel [lo, lo+1)
inline double pixel_mass(double lo, double c, double inv_sqrt2_sigma) {
  return 0.5 * (std::erf((lo + 1.0 - c) * inv_sqrt2_sigma) -
                std::erf((lo - c) * inv_sqrt2_sigma));
}

void deposit_blob(std::vector<double>& img, int nx, int ny, double x, double y,
                  double signal, double sigma) {
  const double inv = 1.0 / (std::sqrt(2.0) * sigma);
  const int half = static_cast<int>(std::ceil(4.0 * sigma)) + 1;
  int i0 = std::max(0, static_cast<int>(std::floor(x)) - half);
  int i1 = std::min(nx - 1, static_cast<int>(std::floor(x)) + half);
  int j0 = std::max(0, static_cast<int>(std::floor(y)) - half);
  int j1 = std::min(ny - 1, static_cast<int>(std::floor(y)) + half);
  for (int j = j0; j <= j1; ++j) {
    double wy = pixel_mass(j, y, inv);
    if (wy <= 0.0) continue;
    for (int i = i0; i <= i1; ++i) {
      double wx = pixel_mass(i, x, inv);
      img[static_cast<size_t>(j) * nx + i] += signal * wx * wy;
    }
  }
}

Frame exposure_core(std::span<const Photon> photons, double accidental_mean,
                    const CameraConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(derive_seed(seed, 0x6578706f7365ULL));
  std::vector<double> img(static_cast<size_t>(cfg.nx) * cfg.ny, 0.0);
  std::lognormal_distribution<double> gain(cfg.gain_mu, cfg.gain_sigma);

  Frame frame;
  frame.width = cfg.nx;
  frame.height = cfg.ny;
  frame.meta.seed = seed;

  for (const Photon& ph : photons) {
    if (ph.x < 0.0 || ph.y < 0.0 || ph.x >= cfg.nx || ph.y >= cfg.ny) {
      ++frame.meta.dropped;
      continue;
    }
    deposit_blob(img, cfg.nx, cfg.ny, ph.x, ph.y, gain(rng), cfg.psf_sigma);
  }

  if (accidental_mean > 0.0) {
    std::poisson_distribution<long> pois(accidental_mean);
    long n_acc = std::max<long>(0, pois(rng));
    std::uniform_real_distribution<double> ux(0.0, cfg.nx), uy(0.0, cfg.ny);
    for (long i = 0; i < n_acc; ++i) {
      double x = ux(rng), y = uy(rng);
      deposit_blob(img, cfg.nx, cfg.ny, x, y, gain(rng), cfg.psf_sigma);
    }
  }

  const bool noisy = cfg.readout_sigma > 0.0;
  std::normal_distribution<double> readout(
      cfg.readout_mean, noisy ? cfg.readout_sigma : 1.0);
  frame.counts.resize(img.size());
  for (size_t k = 0; k < img.size(); ++k) {
    double v = img[k] + (noisy ? readout(rng) : cfg.readout_mean);
    long c = std::llround(v);
    if (c < 0) {
      c = 0;
      ++frame.meta.clamped;
    } else if (c > cfg.saturation) {
      c = cfg.saturation;
      ++frame.meta.clamped;
    }
    frame.counts[k] = static_cast<std::uint16_t>(c);
  }
  return frame;
}

}  // namespace

Frame expose(std::span<const Photon> photons, const CameraConfig& cfg,
             std::uint64_t seed) {
  double acc_mean =
      std::isfinite(cfg.accidental_ratio)
          ? static_cast<double>(photons.size()) / cfg.accidental_ratio
          : 0.0;
  Frame f = exposure_core(photons, acc_mean, cfg, seed);
  f.meta.exposure = "signal";
  return f;
}

Frame dark_frame(const CameraConfig& cfg, double expected_signal_photons,
                 std::uint64_t seed) {
  if (expected_signal_photons < 0.0)
    throw ValidationError("dark_frame: expected_signal_photons must be >= 0");
  double acc_mean = std::isfinite(cfg.accidental_ratio)
                        ? expected_signal_photons / cfg.accidental_ratio
                        : 0.0;
  Frame f = exposure_core({}, acc_mean, cfg, seed);
  f.meta.exposure = "dark";
  return f;
}

}  // namespace qilab
