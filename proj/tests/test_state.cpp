// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "qilab/state.hpp"

using namespace qilab;

namespace {

const GridSpec kGrid{256, 256, 4.0};

ModeSpec lg_spec(int l, int p = 0) {
  ModeSpec m;
  m.family = ModeFamily::LG;
  m.l = l;
  m.p = p;
  m.waist = 1.0;
  return m;
}

HybridState bell_state(int l, double phi = 0.0) {
  HybridState s;
  s.alpha = 1.0 / std::sqrt(2.0);
  s.beta = 1.0 / std::sqrt(2.0);
  s.phi = phi;
  s.spm1 = lg_spec(l);
  s.spm2 = lg_spec(-l);
  return s;
}

double field_rms_diff(const ScalarField& a, const ScalarField& b,
                      double r_cut = 3.2) {
  double rms = 0.0;
  size_t n = 0;
  for (int j = 0; j < a.grid.ny; ++j)
    for (int i = 0; i < a.grid.nx; ++i) {
      if (std::hypot(a.grid.x_at(i), a.grid.y_at(j)) > r_cut) continue;
      double d = a.at(i, j) - b.at(i, j);
      rms += d * d;
      ++n;
    }
  return std::sqrt(rms / n);
}

}  // namespace

TEST_CASE("polarization conventions") {
  auto d = PolarizationState::D();
  auto r = PolarizationState::R();
  CHECK(std::abs(d.cH - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(d.cV - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(r.cV - cplx(0.0, -1.0) / std::sqrt(2.0)) < 1e-15);
  // constructor normalizes
  PolarizationState p(cplx(3.0, 0.0), cplx(0.0, 4.0));
  CHECK(std::norm(p.cH) + std::norm(p.cV) == doctest::Approx(1.0));
}

TEST_CASE("H trigger heralds spm1 with probability alpha^2") {
  HybridState s = bell_state(1);
  s.alpha = 0.8;
  s.beta = 0.6;
  auto res = herald(s, PolarizationState::H(), kGrid);
  CHECK(res.probability == doctest::Approx(0.64).epsilon(1e-9));
  auto ref = lg_field(1, 0, 1.0, kGrid);
  double dmax = 0.0;
  for (size_t k = 0; k < ref.a.size(); ++k)
    dmax = std::max(dmax, std::abs(res.field.a[k] - ref.a[k]));
  CHECK(dmax < 1e-9);
}

TEST_CASE("D trigger heralds the balanced petal superposition") {
  auto res = herald(bell_state(1), PolarizationState::D(), kGrid);
  CHECK(res.probability == doctest::Approx(0.5).epsilon(1e-9));
  auto ref = superpose(1.0, lg_field(1, 0, 1.0, kGrid), 1.0,
                       lg_field(-1, 0, 1.0, kGrid));
  CHECK(std::abs(std::abs(overlap(res.field, ref)) - 1.0) < 1e-9);
}

TEST_CASE("R and L heralded images differ by a 90-degree rotation (l=1)") {
  auto r = herald(bell_state(1), PolarizationState::R(), kGrid);
  auto l = herald(bell_state(1), PolarizationState::L(), kGrid);
  auto ir = intensity(r.field);
  auto il = intensity(l.field);
  CHECK(field_rms_diff(rotate_bilinear(ir, 90.0), il) < 1e-3);
}

TEST_CASE("herald probabilities over an orthonormal trigger pair sum to 1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 8; ++k) {
    HybridState s = bell_state(2, u(rng) * 2.0 * M_PI);
    double a = u(rng);
    s.alpha = std::sqrt(a);
    s.beta = std::sqrt(1.0 - a);
    double th = u(rng) * M_PI, ph = u(rng) * 2.0 * M_PI;
    PolarizationState t1(std::cos(th / 2.0),
                         std::polar(std::sin(th / 2.0), ph));
    PolarizationState t2(-std::polar(std::sin(th / 2.0), -ph),
                         std::cos(th / 2.0));
    double p1 = herald(s, t1, kGrid).probability;
    double p2 = herald(s, t2, kGrid).probability;
    CHECK(p1 + p2 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("global phase of the trigger does not change the heralded image") {
  HybridState s = bell_state(1, 0.9);
  PolarizationState t1 = PolarizationState::D();
  PolarizationState t2(t1.cH * std::polar(1.0, 1.3),
                       t1.cV * std::polar(1.0, 1.3));
  auto r1 = herald(s, t1, kGrid);
  auto r2 = herald(s, t2, kGrid);
  CHECK(r1.probability == doctest::Approx(r2.probability).epsilon(1e-12));
  CHECK(field_rms_diff(intensity(r1.field), intensity(r2.field)) < 1e-12);
}

TEST_CASE("degenerate projection throws") {
  HybridState s = bell_state(1);
  s.alpha = 1.0;
  s.beta = 0.0;
  s.validate();
  CHECK_THROWS_AS(herald(s, PolarizationState::V(), kGrid), NumericError);
}

TEST_CASE("unpolarized mixture is a ring for a Bell state") {
  auto mix = heralded_mixture(bell_state(1), kGrid);
  CHECK(std::abs(mix.sum_area() - 1.0) < 1e-9);
  // angularly uniform: all bins equal within pixel-sampling noise
  auto prof = angular_profile(mix, 0.3, 3.0, 36);
  double mean = 0.0;
  for (double v : prof) mean += v / prof.size();
  // bin-to-bin spread is dominated by unequal pixel counts per bin
  for (double v : prof) CHECK(std::abs(v - mean) / mean < 1e-2);
  // and distinct from any coherent petal pattern
  auto pet = intensity(superpose(1.0, lg_field(1, 0, 1.0, kGrid), 1.0,
                                 lg_field(-1, 0, 1.0, kGrid)));
  CHECK(field_rms_diff(mix, pet) > 0.01);
}

TEST_CASE("mixture reduces to a single mode when beta = 0") {
  HybridState s = bell_state(2);
  s.alpha = 1.0;
  s.beta = 0.0;
  auto mix = heralded_mixture(s, kGrid);
  auto ref = intensity(lg_field(2, 0, 1.0, kGrid));
  CHECK(field_rms_diff(mix, ref) < 1e-12);
}

TEST_CASE("separable witness values") {
  SeparableState s;  // |H>|LG_l>
  CHECK(separable_witness_value(s) == doctest::Approx(0.0));
  s.a = s.b = s.c = s.d = 1.0 / std::sqrt(2.0);
  s.phi1 = s.phi2 = 0.0;
  CHECK(separable_witness_value(s) == doctest::Approx(1.0));
  s.phi2 = M_PI / 2.0;
  CHECK(separable_witness_value(s) == doctest::Approx(0.0).epsilon(1e-12));
  s.phi2 = M_PI;
  CHECK(separable_witness_value(s) == doctest::Approx(-1.0));
}

TEST_CASE("separable witness never exceeds 1 over random states") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double best = -2.0;
  for (int k = 0; k < 100000; ++k) {
    SeparableState s;
    double t1 = u(rng), t2 = u(rng);
    s.a = std::sqrt(t1);
    s.b = std::sqrt(1.0 - t1);
    s.c = std::sqrt(t2);
    s.d = std::sqrt(1.0 - t2);
    s.phi1 = u(rng) * 2.0 * M_PI;
    s.phi2 = u(rng) * 2.0 * M_PI;
    double w = separable_witness_value(s);
    CHECK(w <= 1.0 + 1e-12);
    best = std::max(best, w);
  }
  CHECK(best > 0.99);  // the bound is tight
}

TEST_CASE("state validation") {
  HybridState s = bell_state(1);
  s.alpha = 0.9;
  s.beta = 0.9;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s.alpha = -1.0 / std::sqrt(2.0);
  s.beta = 1.0 / std::sqrt(2.0);
  CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("poincare scan returns one point per trigger and flags degeneracy") {
  HybridState s = bell_state(1);
  s.alpha = 1.0;
  s.beta = 0.0;
  std::vector<PolarizationState> path = {PolarizationState::H(),
                                         PolarizationState::V(),
                                         PolarizationState::D()};
  auto pts = poincare_scan(s, path, kGrid);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].image.has_value());
  CHECK(!pts[1].image.has_value());
  CHECK(pts[1].probability == doctest::Approx(0.0));
  CHECK(pts[2].image.has_value());
}

TEST_CASE("equator scan rotates the petals by 180/l degrees in total") {
  for (int l : {1, 2}) {
    HybridState s = bell_state(l);
    auto path = equator_path(9);
    auto pts = poincare_scan(s, path, GridSpec{512, 512, 4.0});
    REQUIRE(pts.size() == 9);
    // endpoint trigger equals the start, so the images agree
    CHECK(field_rms_diff(*pts.front().image, *pts.back().image) < 1e-10);
    // quarter way round the equator: rotation by 45/l degrees
    auto rot = rotate_bilinear(*pts[0].image, 45.0 / l);
    CHECK(field_rms_diff(rot, *pts[2].image) < 1e-3);
  }
}

TEST_CASE("meridian path endpoints are H") {
  auto path = meridian_path(5);
  REQUIRE(path.size() == 5);
  CHECK(std::abs(path.front().cH - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(path.back().cH) - 1.0) < 1e-12);
  CHECK(std::abs(path[2].cH) < 1e-12);  // halfway: V
}
