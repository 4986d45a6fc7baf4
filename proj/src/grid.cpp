// SPDX-License-Identifier: Apache-2.0
#include "qilab/grid.hpp"

#include <cmath>

namespace qilab {

void GridSpec::validate() const {
  if (nx < 16 || ny < 16)
    throw ValidationError("grid: nx and ny must be >= 16");
  if (!(extent > 0.0)) throw ValidationError("grid: extent must be > 0");
  if (x0 < 0.0 || y0 < 0.0 || x0 > nx || y0 > ny)
    throw ValidationError("grid: center out of bounds");
}

double ComplexField::norm_sq() const {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return s * grid.pixel_area();
}

void ComplexField::normalize() {
  double n2 = norm_sq();
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw NumericError("field normalization: zero or non-finite norm");
  double inv = 1.0 / std::sqrt(n2);
  for (auto& z : a) z *= inv;
  normalized = true;
}

double ScalarField::sum_area() const {
  double s = 0.0;
  for (double x : v) s += x;
  return s * grid.pixel_area();
}

void ScalarField::normalize_density() {
  double s = sum_area();
  if (!(s > 0.0) || !std::isfinite(s))
    throw NumericError("density normalization: zero or non-finite sum");
  double inv = 1.0 / s;
  for (auto& x : v) x *= inv;
  density = true;
}

ScalarField rotate_bilinear(const ScalarField& f, double angle_deg) {
  const GridSpec& g = f.grid;
  double th = angle_deg * M_PI / 180.0;
  double c = std::cos(th), s = std::sin(th);
  ScalarField out;
  out.grid = g;
  out.v.assign(f.v.size(), 0.0);
  // inverse map: sample the input at the point that rotates onto (x, y)
  for (int j = 0; j < g.ny; ++j) {
    double y = g.y_at(j);
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_at(i);
      double xs = c * x + s * y;
      double ys = -s * x + c * y;
      // fractional pixel coordinates of the source point
      double fi = xs / g.dx() + g.cx() - 0.5;
      double fj = ys / g.dy() + g.cy() - 0.5;
      int i0 = static_cast<int>(std::floor(fi));
      int j0 = static_cast<int>(std::floor(fj));
      double tx = fi - i0, ty = fj - j0;
      double acc = 0.0;
      for (int dj = 0; dj <= 1; ++dj) {
        for (int di = 0; di <= 1; ++di) {
          int ii = i0 + di, jj = j0 + dj;
          if (ii < 0 || jj < 0 || ii >= g.nx || jj >= g.ny) continue;
          double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty);
          acc += w * f.at(ii, jj);
        }
      }
      out.at(i, j) = acc;
    }
  }
  out.density = false;
  return out;
}

std::vector<double> angular_profile(const ScalarField& f, double r_min,
                                    double r_max, int n_bins) {
  if (n_bins < 1) throw ValidationError("angular_profile: n_bins < 1");
  const GridSpec& g = f.grid;
  std::vector<double> prof(n_bins, 0.0);
  for (int j = 0; j < g.ny; ++j) {
    double y = g.y_at(j);
    for (int i = 0; i < g.nx; ++i) {
      double x = g.x_at(i);
      double r = std::hypot(x, y);
      if (r < r_min || r > r_max) continue;
      double th = std::atan2(y, x);
      if (th < 0) th += 2.0 * M_PI;
      int b = static_cast<int>(th / (2.0 * M_PI) * n_bins);
      if (b >= n_bins) b = n_bins - 1;
      prof[b] += f.at(i, j);
    }
  }
  return prof;
}

}  // namespace qilab
