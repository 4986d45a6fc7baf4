// SPDX-License-Identifier: Apache-2.0
#include "qilab/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qilab {

int AngularHistogram::bin_of(double angle_deg) const {
  double a = std::fmod(angle_deg - origin_deg, period_deg);
  if (a < 0) a += period_deg;
  int b = static_cast<int>(a / bin_width_deg);
  return std::min(b, nbins() - 1);
}

AngularHistogram angular_bin(std::span<const Frame> frames,
                             const BackgroundModel& bg, const Calibration& cal,
                             int l, double x0, double y0, double r_min,
                             double r_max, double bin_width_deg,
                             double origin_deg) {
  if (frames.empty()) throw ValidationError("angular_bin: no frames");
  if (l < 1) throw ValidationError("angular_bin: l must be >= 1");
  const Frame& f0 = frames[0];
  if (f0.width != bg.width || f0.height != bg.height)
    throw ValidationError("angular_bin: frame/background size mismatch");
  if (x0 < 0 || y0 < 0 || x0 >= f0.width || y0 >= f0.height)
    throw ValidationError("angular_bin: center out of bounds");
  if (!(r_max > r_min) || r_min < 0)
    throw ValidationError("angular_bin: bad radial window");

  AngularHistogram h;
  h.l = l;
  h.period_deg = 360.0 / l;
  h.bin_width_deg = (bin_width_deg > 0.0) ? bin_width_deg : 22.5 / l;
  int nb = static_cast<int>(std::lround(h.period_deg / h.bin_width_deg));
  if (nb < 2 || std::abs(nb * h.bin_width_deg - h.period_deg) > 1e-9)
    throw ValidationError("angular_bin: bin width must tile 360/l exactly");
  h.origin_deg = origin_deg;
  h.x0 = x0;
  h.y0 = y0;
  h.r_min = r_min;
  h.r_max = r_max;
  h.signal.assign(nb, 0.0);

  for (const Frame& f : frames) {
    if (f.width != f0.width || f.height != f0.height)
      throw ValidationError("angular_bin: frame size mismatch");
    for (int j = 0; j < f.height; ++j) {
      double dy = (j + 0.5) - y0;
      for (int i = 0; i < f.width; ++i) {
        double dx = (i + 0.5) - x0;
        double r = std::hypot(dx, dy);
        if (r < r_min || r > r_max) continue;
        double th = std::atan2(dy, dx) * 180.0 / M_PI;
        if (th < 0) th += 360.0;
        size_t k = static_cast<size_t>(j) * f.width + i;
        h.signal[h.bin_of(th)] += f.counts[k] - bg.mean[k];
      }
    }
  }
  h.counts.resize(nb);
  for (int b = 0; b < nb; ++b)
    h.counts[b] = signal_to_photons(std::max(0.0, h.signal[b]), cal);
  return h;
}

AngularHistogram angular_bin(const Frame& frame, const BackgroundModel& bg,
                             const Calibration& cal, int l, double x0,
                             double y0, double r_min, double r_max,
                             double bin_width_deg, double origin_deg) {
  return angular_bin(std::span<const Frame>(&frame, 1), bg, cal, l, x0, y0,
                     r_min, r_max, bin_width_deg, origin_deg);
}

double fringe_origin(const Frame& frame, const BackgroundModel& bg, int l,
                     double x0, double y0, double r_min, double r_max,
                     double bin_width_deg) {
  if (l < 1) throw ValidationError("fringe_origin: l must be >= 1");
  if (frame.width != bg.width || frame.height != bg.height)
    throw ValidationError("fringe_origin: frame/background size mismatch");
  double bw = (bin_width_deg > 0.0) ? bin_width_deg : 22.5 / l;
  cplx c{0.0, 0.0};
  for (int j = 0; j < frame.height; ++j) {
    double dy = (j + 0.5) - y0;
    for (int i = 0; i < frame.width; ++i) {
      double dx = (i + 0.5) - x0;
      double r = std::hypot(dx, dy);
      if (r < r_min || r > r_max) continue;
      size_t k = static_cast<size_t>(j) * frame.width + i;
      double th = std::atan2(dy, dx);
      c += (frame.counts[k] - bg.mean[k]) * std::polar(1.0, -2.0 * l * th);
    }
  }
  if (std::abs(c) < 1e-12) return 0.0;  // no modulation: keep the default
  // fringe maximum angle, in [0, 180/l)
  double gamma = -std::arg(c) / (2.0 * l) * 180.0 / M_PI;
  double fringe_period = 180.0 / l;
  gamma = std::fmod(gamma, fringe_period);
  if (gamma < 0) gamma += fringe_period;
  return gamma - 0.5 * bw;  // one bin centered on the maximum
}

double align_gamma1(const AngularHistogram& hist_D) {
  if (hist_D.counts.empty()) throw ValidationError("align_gamma1: empty");
  int best = 0;
  for (int b = 1; b < hist_D.nbins(); ++b)
    if (hist_D.counts[b].n > hist_D.counts[best].n) best = b;  // tie: lowest
  return hist_D.bin_center(best);
}

namespace {

double vis_of(double a, double b, double c, double d) {
  double denom = a + b + c + d;
  if (denom <= 0.0)
    throw NumericError("visibility: zero denominator");
  return (a + b - c - d) / denom;
}

Vis mc_vis(const std::array<double, 4>& n, const std::array<double, 4>& e,
           std::uint64_t seed, int mc_runs) {
  Vis out;
  out.v = vis_of(n[0], n[1], n[2], n[3]);
  std::mt19937_64 rng(derive_seed(seed, 0x7669ULL));
  std::normal_distribution<double> norm(0.0, 1.0);
  double s1 = 0.0, s2 = 0.0;
  long used = 0;
  for (int r = 0; r < mc_runs; ++r) {
    std::array<double, 4> x;
    for (int i = 0; i < 4; ++i)
      x[i] = std::max(0.0, n[i] + e[i] * norm(rng));
    double denom = x[0] + x[1] + x[2] + x[3];
    if (denom <= 0.0) continue;
    double v = (x[0] + x[1] - x[2] - x[3]) / denom;
    s1 += v;
    s2 += v * v;
    ++used;
  }
  if (used > 1)
    out.err = std::sqrt(std::max(0.0, (s2 - s1 * s1 / used) / (used - 1.0)));
  return out;
}

}  // namespace

Vis visibility(const AngularHistogram& hist_P,
               const AngularHistogram& hist_Porth, double gamma_deg, int l,
               std::uint64_t seed, int mc_runs) {
  if (hist_P.nbins() != hist_Porth.nbins() ||
      std::abs(hist_P.bin_width_deg - hist_Porth.bin_width_deg) > 1e-12)
    throw ValidationError("visibility: histogram binning mismatch");
  double gamma_perp = gamma_deg + 90.0 / l;
  int bg1 = hist_P.bin_of(gamma_deg);
  int bg2 = hist_P.bin_of(gamma_perp);
  std::array<double, 4> n = {
      static_cast<double>(hist_P.counts[bg1].n),
      static_cast<double>(hist_Porth.counts[bg2].n),
      static_cast<double>(hist_P.counts[bg2].n),
      static_cast<double>(hist_Porth.counts[bg1].n)};
  std::array<double, 4> e = {hist_P.counts[bg1].err, hist_Porth.counts[bg2].err,
                             hist_P.counts[bg2].err, hist_Porth.counts[bg1].err};
  return mc_vis(n, e, seed, mc_runs);
}

Vis visibility_minmax(const AngularHistogram& hist_P,
                      const AngularHistogram& hist_Porth, std::uint64_t seed,
                      int mc_runs) {
  auto minmax = [](const AngularHistogram& h) {
    int lo = 0, hi = 0;
    for (int b = 1; b < h.nbins(); ++b) {
      if (h.counts[b].n > h.counts[hi].n) hi = b;
      if (h.counts[b].n < h.counts[lo].n) lo = b;
    }
    return std::pair<int, int>(hi, lo);
  };
  auto [hiP, loP] = minmax(hist_P);
  auto [hiO, loO] = minmax(hist_Porth);
  std::array<double, 4> n = {static_cast<double>(hist_P.counts[hiP].n),
                             static_cast<double>(hist_Porth.counts[hiO].n),
                             static_cast<double>(hist_P.counts[loP].n),
                             static_cast<double>(hist_Porth.counts[loO].n)};
  std::array<double, 4> e = {hist_P.counts[hiP].err, hist_Porth.counts[hiO].err,
                             hist_P.counts[loP].err, hist_Porth.counts[loO].err};
  return mc_vis(n, e, seed, mc_runs);
}

WitnessReport compute_witness(const Vis& vis_DA, const Vis& vis_RL) {
  WitnessReport rep;
  rep.vis_DA = vis_DA;
  rep.vis_RL = vis_RL;
  rep.W = vis_DA.v + vis_RL.v;
  rep.sigma_W = std::hypot(vis_DA.err, vis_RL.err);
  rep.violation_sigmas =
      rep.sigma_W > 0.0 ? (rep.W - 1.0) / rep.sigma_W : 0.0;
  return rep;
}

double bin_average_factor(int l, double bin_width_deg) {
  if (l < 1) throw ValidationError("bin_average_factor: l must be >= 1");
  double bw = (bin_width_deg > 0.0) ? bin_width_deg : 22.5 / l;
  double d = l * bw * M_PI / 180.0;
  return (d > 0.0) ? std::sin(d) / d : 1.0;
}

Calibration make_synthetic_calibration(const CameraConfig& cfg,
                                       std::uint64_t seed, int n_frames,
                                       int photons_per_frame,
                                       const CalibrateOptions& copts) {
  CameraConfig quiet = cfg;
  quiet.accidental_ratio = std::numeric_limits<double>::infinity();

  std::vector<Frame> darks;
  for (int i = 0; i < 20; ++i)
    darks.push_back(dark_frame(quiet, 0.0, derive_seed(seed, 0xD00 + i)));
  BackgroundModel bg = estimate_background(darks);

  std::vector<double> signals;
  const double min_spacing = 10.0;
  for (int fi = 0; fi < n_frames; ++fi) {
    std::mt19937_64 rng(derive_seed(seed, 0xCF00 + fi));
    std::uniform_real_distribution<double> ux(8.0, cfg.nx - 8.0),
        uy(8.0, cfg.ny - 8.0);
    std::vector<Photon> photons;
    int attempts = 0;
    while (static_cast<int>(photons.size()) < photons_per_frame &&
           attempts < photons_per_frame * 200) {
      ++attempts;
      Photon p{ux(rng), uy(rng)};
      bool ok = true;
      for (const Photon& q : photons)
        if (std::hypot(p.x - q.x, p.y - q.y) < min_spacing) {
          ok = false;
          break;
        }
      if (ok) photons.push_back(p);
    }
    Frame f = expose(photons, quiet, derive_seed(seed, 0xCE00 + fi));
    for (const auto& ev : extract_events(f, bg))
      signals.push_back(ev.signal);
  }
  return calibrate(signals, copts);
}

WitnessReport run_experiment(const HybridState& state, const CameraConfig& cfg,
                             double photons_per_image, std::uint64_t seed,
                             const ExperimentOptions& opts) {
  state.validate();
  cfg.validate();
  if (state.spm1.family != ModeFamily::LG ||
      state.spm2.family != ModeFamily::LG ||
      state.spm1.l != -state.spm2.l || std::abs(state.spm1.l) < 1)
    throw ValidationError(
        "run_experiment: state must pair LG_{+l} with LG_{-l}");
  if (opts.grid.nx != cfg.nx || opts.grid.ny != cfg.ny)
    throw ValidationError("run_experiment: grid and camera sizes differ");
  const int l = std::abs(state.spm1.l);
  const double w = state.spm1.waist;
  const double px_per_unit = opts.grid.px_per_unit();

  Calibration local_cal;
  const Calibration* cal = opts.calibration;
  if (!cal) {
    CalibrateOptions copts;
    copts.n_max = opts.cal_n_max;
    copts.seed = derive_seed(seed, 0xCA11B);
    local_cal = make_synthetic_calibration(cfg, derive_seed(seed, 0xCA1F),
                                           opts.cal_frames,
                                           opts.cal_photons_per_frame, copts);
    cal = &local_cal;
  }

  std::vector<Frame> darks;
  for (int i = 0; i < opts.n_dark_frames; ++i)
    darks.push_back(dark_frame(cfg, 0.0, derive_seed(seed, 0xDA00 + i)));
  BackgroundModel bg = estimate_background(darks);

  double v_mix = 1.0;
  if (opts.injected_visibility >= 0.0)
    v_mix = std::min(
        1.0, opts.injected_visibility / bin_average_factor(l, opts.bin_width_deg));

  ScalarField mixture = heralded_mixture(state, opts.grid);
  const std::array<PolarizationState, 4> triggers = {
      PolarizationState::D(), PolarizationState::A(), PolarizationState::R(),
      PolarizationState::L()};

  WitnessReport rep;
  rep.l = l;
  rep.photons_per_image = photons_per_image;
  rep.seed = seed;
  rep.estimator = opts.estimator;

  const double r_min_px = opts.r_min_w * w * px_per_unit;
  const double r_max_px = opts.r_max_w * w * px_per_unit;
  std::array<Frame, 4> frames;
  for (int t = 0; t < 4; ++t) {
    HeraldResult h = herald(state, triggers[t], opts.grid);
    ScalarField density = intensity(h.field);
    if (v_mix < 1.0) {
      for (size_t k = 0; k < density.v.size(); ++k)
        density.v[k] = v_mix * density.v[k] + (1.0 - v_mix) * mixture.v[k];
      density.normalize_density();
    }
    double n_exp = photons_per_image * h.probability / 0.5;
    auto photons =
        sample_photons(density, n_exp, derive_seed(seed, 0xA0 + t));
    frames[t] = expose(photons, cfg, derive_seed(seed, 0xB0 + t));
  }
  // center one bin on the D-trigger fringe maximum, as a rotatable sector
  // mask would be aligned in the laboratory
  double origin = fringe_origin(frames[0], bg, l, cfg.nx / 2.0, cfg.ny / 2.0,
                                r_min_px, r_max_px, opts.bin_width_deg);
  for (int t = 0; t < 4; ++t) {
    rep.histograms[t] =
        angular_bin(frames[t], bg, *cal, l, cfg.nx / 2.0, cfg.ny / 2.0,
                    r_min_px, r_max_px, opts.bin_width_deg, origin);
    double tot = 0.0;
    for (const auto& pc : rep.histograms[t].counts) tot += pc.n;
    rep.image_photon_totals[t] = tot;
  }

  rep.gamma1_deg = align_gamma1(rep.histograms[0]);
  rep.gamma2_deg =
      std::fmod(rep.gamma1_deg + 45.0 / l, rep.histograms[0].period_deg);
  if (rep.gamma2_deg < 0) rep.gamma2_deg += rep.histograms[0].period_deg;
  Vis da, rl;
  if (opts.estimator == "minmax") {
    da = visibility_minmax(rep.histograms[0], rep.histograms[1],
                           derive_seed(seed, 0xE1));
    rl = visibility_minmax(rep.histograms[2], rep.histograms[3],
                           derive_seed(seed, 0xE2));
  } else {
    da = visibility(rep.histograms[0], rep.histograms[1], rep.gamma1_deg, l,
                    derive_seed(seed, 0xE1));
    rl = visibility(rep.histograms[2], rep.histograms[3], rep.gamma2_deg, l,
                    derive_seed(seed, 0xE2));
  }
  WitnessReport wr = compute_witness(da, rl);
  rep.W = wr.W;
  rep.sigma_W = wr.sigma_W;
  rep.violation_sigmas = wr.violation_sigmas;
  rep.vis_DA = da;
  rep.vis_RL = rl;
  return rep;
}

double measure_total_rotation(std::span<const ScalarField> images, int l,
                              double r_min, double r_max) {
  if (images.size() < 2)
    throw ValidationError("measure_total_rotation: need >= 2 images");
  if (l < 1) throw ValidationError("measure_total_rotation: l must be >= 1");
  const int nb = 2880;  // 0.125 degree resolution

  // phase of the 2l-harmonic of the angular profile: unbiased pattern
  // angle for a cos(2l theta) fringe, insensitive to the fixed
  // pixel-sampling jitter of the profile
  auto harmonic = [&](const ScalarField& f) {
    std::vector<double> p = angular_profile(f, r_min, r_max, nb);
    cplx c{0.0, 0.0};
    for (int i = 0; i < nb; ++i) {
      double th = (i + 0.5) * 2.0 * M_PI / nb;
      c += p[i] * std::polar(1.0, -2.0 * l * th);
    }
    if (std::abs(c) < 1e-300)
      throw NumericError("measure_total_rotation: no angular modulation");
    return c;
  };

  double total = 0.0;
  cplx prev = harmonic(images[0]);
  for (size_t k = 1; k < images.size(); ++k) {
    cplx cur = harmonic(images[k]);
    // wrapped phase advance of the fringe, converted to pattern degrees
    double dphase = std::arg(prev / cur);  // in (-pi, pi]
    total += dphase / (2.0 * l) * 180.0 / M_PI;
    prev = cur;
  }
  return total;
}

}  // namespace qilab
