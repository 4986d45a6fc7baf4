// SPDX-License-Identifier: Apache-2.0
#include "qilab/counting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"

namespace qilab {

namespace {
constexpr double kSigmaMin = 1e-6;
}

BackgroundModel estimate_background(std::span<const Frame> dark_frames) {
  if (dark_frames.size() < 2)
    throw ValidationError("estimate_background: need at least 2 frames");
  const Frame& f0 = dark_frames[0];
  const size_t n_px = f0.counts.size();
  for (const Frame& f : dark_frames)
    if (f.width != f0.width || f.height != f0.height)
      throw ValidationError("estimate_background: frame size mismatch");

  BackgroundModel bg;
  bg.width = f0.width;
  bg.height = f0.height;
  bg.mean.assign(n_px, 0.0);
  std::vector<double> m2(n_px, 0.0);  // Welford accumulators
  double count = 0.0;
  for (const Frame& f : dark_frames) {
    count += 1.0;
    for (size_t k = 0; k < n_px; ++k) {
      double x = f.counts[k];
      double d = x - bg.mean[k];
      bg.mean[k] += d / count;
      m2[k] += d * (x - bg.mean[k]);
    }
  }
  double pooled = 0.0;
  for (size_t k = 0; k < n_px; ++k) pooled += m2[k] / (count - 1.0);
  pooled /= static_cast<double>(n_px);
  bg.sigma_global = std::max(std::sqrt(pooled), kSigmaMin);
  if (dark_frames.size() >= 10) {
    bg.sigma_px.resize(n_px);
    for (size_t k = 0; k < n_px; ++k)
      bg.sigma_px[k] = std::max(std::sqrt(m2[k] / (count - 1.0)), kSigmaMin);
    bg.has_per_pixel = true;
  }
  return bg;
}

std::vector<PhotonEvent> extract_events(const Frame& frame,
                                        const BackgroundModel& bg,
                                        SigmaMode mode) {
  if (frame.width != bg.width || frame.height != bg.height)
    throw ValidationError("extract_events: frame/background size mismatch");
  const bool per_px = (mode == SigmaMode::PerPixel);
  const int w = frame.width, h = frame.height;
  const size_t n_px = frame.counts.size();

  std::vector<double> sub(n_px);
  for (size_t k = 0; k < n_px; ++k) sub[k] = frame.counts[k] - bg.mean[k];

  // 0 = below member threshold, 1 = member (>1 sigma), 2 = seed (>5 sigma)
  std::vector<uint8_t> mark(n_px, 0);
  for (size_t k = 0; k < n_px; ++k) {
    double s = bg.sigma_at(k, per_px);
    if (sub[k] > 5.0 * s)
      mark[k] = 2;
    else if (sub[k] > s)
      mark[k] = 1;
  }

  std::vector<PhotonEvent> events;
  std::vector<int> stack;
  std::vector<uint8_t> visited(n_px, 0);
  for (size_t start = 0; start < n_px; ++start) {
    if (mark[start] != 2 || visited[start]) continue;
    PhotonEvent ev;
    bool has_seed = false;
    stack.clear();
    stack.push_back(static_cast<int>(start));
    visited[start] = 1;
    while (!stack.empty()) {
      int k = stack.back();
      stack.pop_back();
      if (mark[k] == 2) has_seed = true;
      ev.pixels.push_back(k);
      int x = k % w, y = k / w;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          int nk = ny * w + nx;
          if (!visited[nk] && mark[nk] >= 1) {
            visited[nk] = 1;
            stack.push_back(nk);
          }
        }
      }
    }
    if (!has_seed) continue;
    double sig = 0.0, sx = 0.0, sy = 0.0;
    for (int k : ev.pixels) {
      double v = std::max(0.0, sub[k]);
      sig += sub[k];
      sx += v * (k % w + 0.5);
      sy += v * (k / w + 0.5);
    }
    if (sig <= 0.0) continue;
    double wsum = 0.0;
    for (int k : ev.pixels) wsum += std::max(0.0, sub[k]);
    ev.signal = sig;
    ev.cx = sx / wsum;
    ev.cy = sy / wsum;
    std::sort(ev.pixels.begin(), ev.pixels.end());
    events.push_back(std::move(ev));
  }
  return events;
}

double Calibration::sigma_signal(long n) const {
  if (n <= 0) return sigma_lookup.empty() ? 0.0 : sigma_lookup.front();
  long n_max = static_cast<long>(sigma_lookup.size());
  if (n <= n_max) return sigma_lookup[n - 1];
  return sigma_lookup.back() * std::sqrt(static_cast<double>(n) / n_max);
}

Calibration calibrate(std::span<const double> event_signals,
                      const CalibrateOptions& opts) {
  if (static_cast<int>(event_signals.size()) < opts.min_events)
    throw ValidationError("calibrate: too few events");
  for (double s : event_signals)
    if (!(s > 0.0)) throw ValidationError("calibrate: non-positive signal");

  // drop electronics artifacts: a genuine photon never deposits a signal
  // orders of magnitude below the typical event, but a rare readout
  // fluctuation past the seed threshold does, and such outliers wreck the
  // log-moment fit
  std::vector<double> sorted(event_signals.begin(), event_signals.end());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double floor_cut = 0.02 * sorted[sorted.size() / 2];
  std::vector<double> signals;
  signals.reserve(sorted.size());
  for (double s : event_signals)
    if (s >= floor_cut) signals.push_back(s);
  if (static_cast<int>(signals.size()) < opts.min_events)
    throw ValidationError("calibrate: too few events");

  Calibration cal;
  cal.n_events_used = static_cast<long>(signals.size());
  cal.seed = opts.seed;
  if (cal.n_events_used < opts.warn_events) {
    cal.low_statistics = true;
    std::cerr << "calibrate: only " << cal.n_events_used
              << " events; statistics may be poor\n";
  }

  double sum = 0.0, lsum = 0.0, lsq = 0.0;
  for (double s : signals) {
    sum += s;
    double ls = std::log(s);
    lsum += ls;
    lsq += ls * ls;
  }
  const double n = static_cast<double>(signals.size());
  cal.mu1 = sum / n;
  cal.log_mu = lsum / n;
  cal.log_sigma = std::sqrt(std::max(0.0, (lsq - lsum * lsum / n) / (n - 1.0)));

  // sigma(n) lookup: running sums over independent MC runs give every
  // photon number in one pass. Fixed chunking keeps the result identical
  // regardless of thread count.
  const int n_max = opts.n_max;
  const int runs = opts.mc_runs;
  const int n_chunks = 64;
  std::vector<std::vector<double>> acc1(n_chunks), acc2(n_chunks);
  parallel_chunks(n_chunks, [&](int c) {
    int r0 = static_cast<int>(static_cast<long>(runs) * c / n_chunks);
    int r1 = static_cast<int>(static_cast<long>(runs) * (c + 1) / n_chunks);
    std::vector<double>&a1 = acc1[c], &a2 = acc2[c];
    a1.assign(n_max, 0.0);
    a2.assign(n_max, 0.0);
    for (int r = r0; r < r1; ++r) {
      std::mt19937_64 rng(derive_seed(opts.seed, 0xCA1 + r));
      std::lognormal_distribution<double> gain(cal.log_mu, cal.log_sigma);
      double s = 0.0;
      for (int i = 0; i < n_max; ++i) {
        s += gain(rng);
        a1[i] += s;
        a2[i] += s * s;
      }
    }
  });
  cal.sigma_lookup.assign(n_max, 0.0);
  cal.mc_mean.assign(n_max, 0.0);
  for (int i = 0; i < n_max; ++i) {
    double s1 = 0.0, s2 = 0.0;
    for (int c = 0; c < n_chunks; ++c) {
      s1 += acc1[c][i];
      s2 += acc2[c][i];
    }
    double mean = s1 / runs;
    double var = (s2 - s1 * s1 / runs) / (runs - 1.0);
    cal.mc_mean[i] = mean;
    cal.sigma_lookup[i] = std::sqrt(std::max(0.0, var));
  }
  // enforce monotonicity (MC jitter only; sigma(n) grows like sqrt(n))
  for (int i = 1; i < n_max; ++i)
    cal.sigma_lookup[i] = std::max(cal.sigma_lookup[i], cal.sigma_lookup[i - 1]);
  return cal;
}

Calibration calibrate(std::span<const PhotonEvent> events,
                      const CalibrateOptions& opts) {
  std::vector<double> signals;
  signals.reserve(events.size());
  for (const auto& e : events) signals.push_back(e.signal);
  return calibrate(signals, opts);
}

PhotonCount signal_to_photons(double region_signal, const Calibration& cal) {
  if (region_signal < 0.0)
    throw ValidationError("signal_to_photons: negative signal");
  if (!(cal.mu1 > 0.0)) throw ValidationError("signal_to_photons: bad mu1");
  PhotonCount pc;
  if (region_signal == 0.0) return pc;  // (0, 0)
  pc.n = std::llround(region_signal / cal.mu1);
  // n = 0 with nonzero signal: report the single-photon error as a bound
  long n_err = std::max<long>(1, pc.n);
  pc.err = cal.sigma_signal(n_err) / cal.mu1;
  return pc;
}

void save_calibration(const Calibration& cal, const std::string& path) {
  nlohmann::json j;
  j["mu1"] = cal.mu1;
  j["lognormal"] = {{"mu", cal.log_mu}, {"sigma", cal.log_sigma}};
  j["sigma_lookup"] = cal.sigma_lookup;
  j["n_events_used"] = cal.n_events_used;
  j["seed"] = cal.seed;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

Calibration load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(std::string("bad calibration file: ") + e.what());
  }
  Calibration cal;
  cal.mu1 = j.at("mu1").get<double>();
  cal.log_mu = j.at("lognormal").at("mu").get<double>();
  cal.log_sigma = j.at("lognormal").at("sigma").get<double>();
  cal.sigma_lookup = j.at("sigma_lookup").get<std::vector<double>>();
  cal.n_events_used = j.at("n_events_used").get<long>();
  cal.seed = j.at("seed").get<std::uint64_t>();
  return cal;
}

}  // namespace qilab
