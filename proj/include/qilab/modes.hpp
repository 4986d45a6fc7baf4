// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qilab/grid.hpp"

namespace qilab {

enum class ModeFamily { LG, HG, IG };
enum class InceParity { Even, Odd };

// Recipe for a transverse mode. Index fields are interpreted per family:
//   LG: l (signed OAM), p (radial)        HG: n, m (Cartesian orders)
//   IG: ig_p, ig_m, parity, epsilon (ellipticity)
struct ModeSpec {
  ModeFamily family = ModeFamily::LG;
  int l = 0, p = 0;
  int n = 0, m = 0;
  int ig_p = 0, ig_m = 0;
  InceParity parity = InceParity::Even;
  double epsilon = 0.0;
  double waist = 1.0;

  void validate() const;
};

ComplexField lg_field(int l, int p, double w, const GridSpec& grid);
ComplexField hg_field(int n, int m, double w, const GridSpec& grid);
ComplexField ig_field(int p, int m, InceParity parity, double epsilon, double w,
                      const GridSpec& grid);
ComplexField mode_field(const ModeSpec& spec, const GridSpec& grid);

// c1*f1 + c2*f2, renormalized. Grids must match. For |c1| == |c2| the
// relative phase arg(c2/c1) is recorded on the result.
ComplexField superpose(cplx c1, const ComplexField& f1, cplx c2,
                       const ComplexField& f2);

// |u|^2 per pixel as a probability density. Requires a normalized field.
ScalarField intensity(const ComplexField& f);

// Discrete inner product sum(conj(u1) * u2) * pixel_area.
cplx overlap(const ComplexField& f1, const ComplexField& f2);

// Spatial rotation (degrees) of an LG_{+l}/LG_{-l} superposition pattern
// produced by shifting the relative phase by dphi radians: dphi / (2l),
// converted to degrees.
double expected_rotation(int l, double dphi);

// Fourier coefficients of the Ince polynomial C_p^m / S_p^m for the given
// ellipticity, from the tridiagonal recurrence eigenproblem. Basis order:
// even parity, even p:  cos(2k eta),      k = 0..p/2
// even parity, odd p:   cos((2k+1) eta),  k = 0..(p-1)/2
// odd parity, even p:   sin(2k eta),      k = 1..p/2
// odd parity, odd p:    sin((2k+1) eta),  k = 0..(p-1)/2
// Sign convention: first nonzero coefficient positive.
std::vector<double> ince_coefficients(int p, int m, InceParity parity,
                                      double epsilon);

}  // namespace qilab
