// SPDX-License-Identifier: Apache-2.0
#include "qilab/modes.hpp"

#include <cmath>

namespace qilab {

namespace {

// generalized Laguerre L_p^k(x) by the stable upward recurrence
double laguerre(int p, int k, double x) {
  if (p == 0) return 1.0;
  double lm1 = 1.0;
  double l0 = 1.0 + k - x;
  for (int i = 1; i < p; ++i) {
    double l1 = ((2.0 * i + 1.0 + k - x) * l0 - (i + k) * lm1) / (i + 1.0);
    lm1 = l0;
    l0 = l1;
  }
  return l0;
}

// physicists' Hermite H_n(x)
double hermite(int n, double x) {
  if (n == 0) return 1.0;
  double hm1 = 1.0;
  double h0 = 2.0 * x;
  for (int i = 1; i < n; ++i) {
    double h1 = 2.0 * x * h0 - 2.0 * i * hm1;
    hm1 = h0;
    h0 = h1;
  }
  return h0;
}

void check_mode_args(double w, const GridSpec& grid) {
  grid.validate();
  if (!(w > 0.0)) throw ValidationError("mode: waist must be > 0");
}

}  // namespace

void ModeSpec::validate() const {
  if (!(waist > 0.0)) throw ValidationError("ModeSpec: waist must be > 0");
  switch (family) {
    case ModeFamily::LG:
      if (p < 0) throw ValidationError("ModeSpec: LG radial index p < 0");
      break;
    case ModeFamily::HG:
      if (n < 0 || m < 0) throw ValidationError("ModeSpec: HG indices < 0");
      break;
    case ModeFamily::IG:
      if (ig_p < 0 || ig_m < 0 || ig_m > ig_p || (ig_p - ig_m) % 2 != 0)
        throw ValidationError("ModeSpec: invalid IG (p, m)");
      if (parity == InceParity::Odd && ig_m < 1)
        throw ValidationError("ModeSpec: odd IG requires m >= 1");
      if (epsilon < 0.0) throw ValidationError("ModeSpec: epsilon < 0");
      break;
  }
}

ComplexField lg_field(int l, int p, double w, const GridSpec& grid) {
  check_mode_args(w, grid);
  if (p < 0) throw ValidationError("lg_field: p must be >= 0");
  ComplexField f;
  f.grid = grid;
  f.a.resize(static_cast<size_t>(grid.nx) * grid.ny);
  const int al = std::abs(l);
  for (int j = 0; j < grid.ny; ++j) {
    double y = grid.y_at(j);
    for (int i = 0; i < grid.nx; ++i) {
      double x = grid.x_at(i);
      double r2 = x * x + y * y;
      double rho = r2 / (w * w);
      cplx val;
      if (r2 == 0.0) {
        val = (al == 0) ? cplx(laguerre(p, 0, 0.0), 0.0) : cplx(0.0, 0.0);
      } else {
        // radial prefactor in the log domain so orders up to l ~ 100 work
        double t = 0.5 * al * std::log(2.0 * rho) - rho;
        double L = laguerre(p, al, 2.0 * rho);
        double amp = (t < -700.0) ? 0.0 : L * std::exp(t);
        double th = std::atan2(y, x);
        val = amp * std::polar(1.0, l * th);
      }
      f.at(i, j) = val;
    }
  }
  f.normalize();
  return f;
}

ComplexField hg_field(int n, int m, double w, const GridSpec& grid) {
  check_mode_args(w, grid);
  if (n < 0 || m < 0) throw ValidationError("hg_field: indices must be >= 0");
  ComplexField f;
  f.grid = grid;
  f.a.resize(static_cast<size_t>(grid.nx) * grid.ny);
  const double s = std::sqrt(2.0) / w;
  for (int j = 0; j < grid.ny; ++j) {
    double y = grid.y_at(j);
    double hy = hermite(m, s * y);
    for (int i = 0; i < grid.nx; ++i) {
      double x = grid.x_at(i);
      double g = std::exp(-(x * x + y * y) / (w * w));
      f.at(i, j) = hermite(n, s * x) * hy * g;
    }
  }
  f.normalize();
  return f;
}

ComplexField ig_field(int p, int m, InceParity parity, double epsilon, double w,
                      const GridSpec& grid) {
  check_mode_args(w, grid);
  std::vector<double> c = ince_coefficients(p, m, parity, epsilon);
  const std::vector<int> freq = [&] {
    std::vector<int> fr;
    bool even_p = (p % 2 == 0);
    if (parity == InceParity::Even) {
      if (even_p)
        for (size_t k = 0; k < c.size(); ++k) fr.push_back(2 * static_cast<int>(k));
      else
        for (size_t k = 0; k < c.size(); ++k) fr.push_back(2 * static_cast<int>(k) + 1);
    } else {
      if (even_p)
        for (size_t k = 0; k < c.size(); ++k) fr.push_back(2 * (static_cast<int>(k) + 1));
      else
        for (size_t k = 0; k < c.size(); ++k) fr.push_back(2 * static_cast<int>(k) + 1);
    }
    return fr;
  }();

  // semifocal separation at the waist: eps = 2 f^2 / w^2
  const double fsep = (epsilon > 0.0) ? w * std::sqrt(epsilon / 2.0)
                                      : w * std::sqrt(0.5e-12);
  ComplexField f;
  f.grid = grid;
  f.a.resize(static_cast<size_t>(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    double y = grid.y_at(j);
    for (int i = 0; i < grid.nx; ++i) {
      double x = grid.x_at(i);
      // elliptic coordinates from cosh(xi + i eta) = (x + i y) / f
      cplx zeta = std::acosh(cplx(x / fsep, y / fsep));
      double xi = zeta.real();
      double eta = zeta.imag();
      double rad = 0.0, ang = 0.0;
      if (parity == InceParity::Even) {
        for (size_t k = 0; k < c.size(); ++k) {
          rad += c[k] * std::cosh(freq[k] * xi);
          ang += c[k] * std::cos(freq[k] * eta);
        }
      } else {
        for (size_t k = 0; k < c.size(); ++k) {
          rad += c[k] * std::sinh(freq[k] * xi);
          ang += c[k] * std::sin(freq[k] * eta);
        }
      }
      double g = std::exp(-(x * x + y * y) / (w * w));
      double val = rad * ang * g;
      if (!std::isfinite(val)) throw NumericError("ig_field: overflow");
      f.at(i, j) = val;
    }
  }
  f.normalize();
  return f;
}

ComplexField mode_field(const ModeSpec& spec, const GridSpec& grid) {
  spec.validate();
  switch (spec.family) {
    case ModeFamily::LG:
      return lg_field(spec.l, spec.p, spec.waist, grid);
    case ModeFamily::HG:
      return hg_field(spec.n, spec.m, spec.waist, grid);
    case ModeFamily::IG:
      return ig_field(spec.ig_p, spec.ig_m, spec.parity, spec.epsilon,
                      spec.waist, grid);
  }
  throw ValidationError("mode_field: unknown family");
}

ComplexField superpose(cplx c1, const ComplexField& f1, cplx c2,
                       const ComplexField& f2) {
  if (!(f1.grid == f2.grid))
    throw ValidationError("superpose: grid mismatch");
  ComplexField out;
  out.grid = f1.grid;
  out.a.resize(f1.a.size());
  for (size_t k = 0; k < f1.a.size(); ++k)
    out.a[k] = c1 * f1.a[k] + c2 * f2.a[k];
  double n2 = out.norm_sq();
  double scale = std::norm(c1) + std::norm(c2);
  if (n2 < 1e-12 * scale)
    throw ValidationError("superpose: degenerate (vanishing) result");
  out.normalize();
  if (std::abs(std::abs(c1) - std::abs(c2)) < 1e-12 && std::abs(c1) > 0.0)
    out.relative_phase = std::arg(c2 / c1);
  return out;
}

ScalarField intensity(const ComplexField& f) {
  double n2 = f.norm_sq();
  if (std::abs(n2 - 1.0) > 1e-6)
    throw ValidationError("intensity: field is not normalized");
  ScalarField s;
  s.grid = f.grid;
  s.v.resize(f.a.size());
  for (size_t k = 0; k < f.a.size(); ++k) s.v[k] = std::norm(f.a[k]);
  s.normalize_density();
  return s;
}

cplx overlap(const ComplexField& f1, const ComplexField& f2) {
  if (!(f1.grid == f2.grid)) throw ValidationError("overlap: grid mismatch");
  cplx s(0.0, 0.0);
  for (size_t k = 0; k < f1.a.size(); ++k) s += std::conj(f1.a[k]) * f2.a[k];
  return s * f1.grid.pixel_area();
}

double expected_rotation(int l, double dphi) {
  if (l < 1) throw ValidationError("expected_rotation: l must be >= 1");
  return dphi / (2.0 * l) * 180.0 / M_PI;
}

}  // namespace qilab
