// SPDX-License-Identifier: Apache-2.0
#include "qilab/state.hpp"

#include <cmath>

namespace qilab {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

PolarizationState::PolarizationState(cplx h, cplx v) : cH(h), cV(v) {
  double n = std::norm(h) + std::norm(v);
  if (std::abs(n - 1.0) > 1e-12) {
    if (!(n > 0.0)) throw ValidationError("polarization: zero Jones vector");
    double inv = 1.0 / std::sqrt(n);
    cH *= inv;
    cV *= inv;
  }
}

PolarizationState PolarizationState::D() {
  return {{kInvSqrt2, 0}, {kInvSqrt2, 0}};
}
PolarizationState PolarizationState::A() {
  return {{kInvSqrt2, 0}, {-kInvSqrt2, 0}};
}
PolarizationState PolarizationState::R() {
  return {{kInvSqrt2, 0}, {0, -kInvSqrt2}};
}
PolarizationState PolarizationState::L() {
  return {{kInvSqrt2, 0}, {0, kInvSqrt2}};
}

void HybridState::validate() const {
  if (alpha < 0.0 || beta < 0.0)
    throw ValidationError("HybridState: amplitudes must be >= 0");
  if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
    throw ValidationError("HybridState: alpha^2 + beta^2 != 1");
  spm1.validate();
  spm2.validate();
}

void SeparableState::validate() const {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw ValidationError("SeparableState: amplitudes must be >= 0");
  if (std::abs(a * a + b * b - 1.0) > 1e-12 ||
      std::abs(c * c + d * d - 1.0) > 1e-12)
    throw ValidationError("SeparableState: factors not normalized");
  if (l < 1) throw ValidationError("SeparableState: l must be >= 1");
}

HeraldResult herald(const HybridState& state, const PolarizationState& trigger,
                    const GridSpec& grid) {
  state.validate();
  ComplexField u1 = mode_field(state.spm1, grid);
  ComplexField u2 = mode_field(state.spm2, grid);
  cplx a1 = state.alpha * std::conj(trigger.cH);
  cplx a2 = state.beta * std::polar(1.0, state.phi) * std::conj(trigger.cV);
  ComplexField u;
  u.grid = grid;
  u.a.resize(u1.a.size());
  for (size_t k = 0; k < u.a.size(); ++k)
    u.a[k] = a1 * u1.a[k] + a2 * u2.a[k];
  double prob = u.norm_sq();
  if (prob < 1e-12)
    throw NumericError("herald: degenerate projection (no heralded photon)");
  if (prob > 1.0) prob = std::min(prob, 1.0 + 1e-9);
  u.normalize();
  return {std::min(prob, 1.0), std::move(u)};
}

ScalarField heralded_mixture(const HybridState& state, const GridSpec& grid) {
  state.validate();
  ComplexField u1 = mode_field(state.spm1, grid);
  ComplexField u2 = mode_field(state.spm2, grid);
  ScalarField s;
  s.grid = grid;
  s.v.resize(u1.a.size());
  double a2 = state.alpha * state.alpha, b2 = state.beta * state.beta;
  for (size_t k = 0; k < s.v.size(); ++k)
    s.v[k] = a2 * std::norm(u1.a[k]) + b2 * std::norm(u2.a[k]);
  s.normalize_density();
  return s;
}

double separable_witness_value(const SeparableState& s) {
  s.validate();
  return 4.0 * s.a * s.b * s.c * s.d * std::cos(s.phi1 - s.phi2);
}

std::vector<ScanPoint> poincare_scan(const HybridState& state,
                                     std::span<const PolarizationState> path,
                                     const GridSpec& grid) {
  if (path.empty()) throw ValidationError("poincare_scan: empty path");
  std::vector<ScanPoint> out;
  out.reserve(path.size());
  for (const auto& trig : path) {
    ScanPoint pt;
    pt.trigger = trig;
    try {
      HeraldResult h = herald(state, trig, grid);
      pt.probability = h.probability;
      pt.image = intensity(h.field);
    } catch (const NumericError&) {
      pt.probability = 0.0;  // degenerate point: empty-frame marker
    }
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<PolarizationState> equator_path(int steps) {
  if (steps < 1) throw ValidationError("equator_path: steps must be >= 1");
  std::vector<PolarizationState> path;
  path.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    // chi runs 0 -> -2pi so the scan visits D, R, A, L, D and the heralded
    // relative phase increases monotonically
    double chi = -2.0 * M_PI * (steps > 1 ? double(k) / (steps - 1) : 0.0);
    path.emplace_back(cplx(kInvSqrt2, 0.0),
                      std::polar(kInvSqrt2, chi));
  }
  return path;
}

std::vector<PolarizationState> meridian_path(int steps) {
  if (steps < 1) throw ValidationError("meridian_path: steps must be >= 1");
  std::vector<PolarizationState> path;
  path.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    double th = 2.0 * M_PI * (steps > 1 ? double(k) / (steps - 1) : 0.0);
    path.emplace_back(cplx(std::cos(th / 2), 0.0), cplx(std::sin(th / 2), 0.0));
  }
  return path;
}

}  // namespace qilab
