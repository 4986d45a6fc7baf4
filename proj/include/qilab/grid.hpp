// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "qilab/common.hpp"

namespace qilab {

using cplx = std::complex<double>;

// Discretization of the camera plane. Physical coordinates span
// [-extent, extent] in each axis (beam-waist units); pixels are sampled at
// their centers relative to the center pixel position (x0, y0).
struct GridSpec {
  int nx = 512;
  int ny = 512;
  double extent = 4.0;
  double x0 = 0.0;  // center, pixel coordinates; 0 means nx/2
  double y0 = 0.0;

  void validate() const;
  double cx() const { return x0 > 0.0 ? x0 : nx / 2.0; }
  double cy() const { return y0 > 0.0 ? y0 : ny / 2.0; }
  double dx() const { return 2.0 * extent / nx; }
  double dy() const { return 2.0 * extent / ny; }
  double pixel_area() const { return dx() * dy(); }
  double x_at(int i) const { return (i + 0.5 - cx()) * dx(); }
  double y_at(int j) const { return (j + 0.5 - cy()) * dy(); }
  // pixels per physical unit (x axis)
  double px_per_unit() const { return nx / (2.0 * extent); }
  bool operator==(const GridSpec&) const = default;
};

// Complex amplitude sampled on a grid.
struct ComplexField {
  GridSpec grid;
  std::vector<cplx> a;
  bool normalized = false;
  // set by superpose() for equally weighted two-mode superpositions
  std::optional<double> relative_phase;

  cplx& at(int ix, int iy) { return a[static_cast<size_t>(iy) * grid.nx + ix]; }
  const cplx& at(int ix, int iy) const {
    return a[static_cast<size_t>(iy) * grid.nx + ix];
  }
  double norm_sq() const;  // sum |a|^2 * pixel area
  void normalize();
};

// Non-negative real field (intensity / probability density).
struct ScalarField {
  GridSpec grid;
  std::vector<double> v;
  bool density = false;

  double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * grid.nx + ix]; }
  const double& at(int ix, int iy) const {
    return v[static_cast<size_t>(iy) * grid.nx + ix];
  }
  double sum_area() const;  // sum v * pixel area
  void normalize_density();
};

// Bilinear rotation of a scalar field about the grid center by angle_deg
// (counterclockwise in the x-y plane). Samples falling outside the input
// grid read as zero. Test/analysis utility.
ScalarField rotate_bilinear(const ScalarField& f, double angle_deg);

// Intensity integrated over fine angular bins inside an annulus
// [r_min, r_max] (physical units, about the grid center). Returns n_bins
// values covering [0, 360) degrees.
std::vector<double> angular_profile(const ScalarField& f, double r_min,
                                    double r_max, int n_bins);

}  // namespace qilab
