// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qilab/modes.hpp"

namespace qilab {

// Jones vector of the trigger photon. Convention for the named states:
//   D = (H+V)/sqrt2, A = (H-V)/sqrt2, R = (H-iV)/sqrt2, L = (H+iV)/sqrt2,
// chosen so an equator scan D -> R -> A -> L advances the relative phase
// of the heralded LG superposition monotonically.
struct PolarizationState {
  cplx cH{1.0, 0.0};
  cplx cV{0.0, 0.0};

  PolarizationState() = default;
  PolarizationState(cplx h, cplx v);

  static PolarizationState H() { return {{1, 0}, {0, 0}}; }
  static PolarizationState V() { return {{0, 0}, {1, 0}}; }
  static PolarizationState D();
  static PolarizationState A();
  static PolarizationState R();
  static PolarizationState L();
};

// Hybrid two-photon state alpha|H>|spm1> + beta e^{i phi}|V>|spm2>.
struct HybridState {
  double alpha = 1.0;
  double beta = 0.0;
  double phi = 0.0;
  ModeSpec spm1;
  ModeSpec spm2;

  void validate() const;
};

// Pure product state (a|H> + b e^{i phi1}|V>) x (c|LG_l> + d e^{i phi2}|LG_-l>).
struct SeparableState {
  double a = 1.0, b = 0.0, phi1 = 0.0;
  double c = 1.0, d = 0.0, phi2 = 0.0;
  int l = 1;

  void validate() const;
};

struct HeraldResult {
  double probability;
  ComplexField field;  // renormalized conditional spatial mode
};

// Projects the trigger photon onto `trigger` and returns the conditional
// spatial mode of the partner with the projection probability.
HeraldResult herald(const HybridState& state, const PolarizationState& trigger,
                    const GridSpec& grid);

// Intensity registered with no polarizer in the trigger path:
// alpha^2 |spm1|^2 + beta^2 |spm2|^2, as a normalized density.
ScalarField heralded_mixture(const HybridState& state, const GridSpec& grid);

// Witness value of a pure separable state: 4*a*b*c*d*cos(phi1 - phi2).
double separable_witness_value(const SeparableState& s);

struct ScanPoint {
  PolarizationState trigger;
  double probability = 0.0;
  std::optional<ScalarField> image;  // empty on degenerate projection
};

std::vector<ScanPoint> poincare_scan(const HybridState& state,
                                     std::span<const PolarizationState> path,
                                     const GridSpec& grid);

// Convenience paths for the scan command: equator D->R->A->L->D and the
// meridian through H. `steps` points, endpoint included.
std::vector<PolarizationState> equator_path(int steps);
std::vector<PolarizationState> meridian_path(int steps);

}  // namespace qilab
