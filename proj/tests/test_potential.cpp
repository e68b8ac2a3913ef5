#include <catch2/catch_amalgamated.hpp>

#include <diracres/potential.hpp>

using namespace diracres;

TEST_CASE("bump profile: unit peak, compact support, smooth tail") {
  const BumpProfile p = make_bump_profile(1.0);
  CHECK(p(0.0) == 1.0);
  CHECK(p(1.0) == 0.0);
  CHECK(p(1.5) == 0.0);
  CHECK(p(0.5) == Catch::Approx(std::exp(1.0 - 1.0 / 0.75)).epsilon(1e-15));
  // monotone decreasing on [0, R0]
  double prev = p(0.0);
  for (int i = 1; i <= 50; ++i) {
    const double cur = p(i / 50.0);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  // derivatives die at the edge: finite differences at r = R0 - eps tiny
  CHECK(p(1.0 - 1e-4) < 1e-8);
  CHECK_THROWS_AS(make_bump_profile(0.0), NonPositiveRadius);
  CHECK_THROWS_AS(make_bump_profile(-2.0), NonPositiveRadius);
}

TEST_CASE("profile scales with R0") {
  const BumpProfile p1 = make_bump_profile(1.0);
  const BumpProfile p2 = make_bump_profile(2.0);
  for (const double r : {0.1, 0.4, 0.7, 0.95}) {
    CHECK(p2(2.0 * r) == Catch::Approx(p1(r)).margin(1e-15));
  }
}

TEST_CASE("matrix factors are Hermitian in every channel") {
  MatrixPotential v;
  v.channel = PotentialChannel::ElectricI4;
  CHECK((v.matrix_factor() - Mat4::Identity()).norm() == 0.0);

  v.channel = PotentialChannel::ScalarBeta;
  CHECK((v.matrix_factor() - v.matrix_factor().adjoint()).norm() == 0.0);
  CHECK((v.matrix_factor() * v.matrix_factor() - Mat4::Identity()).norm() ==
        0.0);

  v.channel = PotentialChannel::CustomHermitian;
  Mat4 h;
  h << 1.0, Complex(0, 0.5), 0.0, 0.0, Complex(0, -0.5), 2.0, 0.0, 0.0, 0.0,
      0.0, -1.0, 0.25, 0.0, 0.0, 0.25, 0.5;
  v.custom = h;
  CHECK((v.matrix_factor() - v.matrix_factor().adjoint()).norm() < 1e-15);
}

TEST_CASE("pointwise samples: radial, Hermitian, compactly supported") {
  MatrixPotential v;  // defaults: electric, g = 2, R0 = 1
  const Vec3 x(0.3, -0.2, 0.4);
  const Mat4 m = sample_potential(v, x);
  CHECK((m - m.adjoint()).norm() < 1e-15);
  CHECK((m - v.scalar(x.norm()) * Mat4::Identity()).norm() < 1e-15);
  // rotation invariance: same radius, same matrix
  const Vec3 y(x.norm(), 0.0, 0.0);
  CHECK((sample_potential(v, y) - m).norm() < 1e-15);
  // support
  CHECK(sample_potential(v, Vec3(1.01, 0.0, 0.0)).norm() == 0.0);
  CHECK(sample_potential(v, Vec3(0.9, 0.9, 0.9)).norm() == 0.0);
}

TEST_CASE("cutoff is one on the support and vanishes beyond the margin") {
  const CutoffProfile chi = make_cutoff(1.0, 0.25);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(0.999999) == 1.0);
  CHECK(chi(1.25) == 0.0);
  CHECK(chi(2.0) == 0.0);
  CHECK(chi.outer_radius() == Catch::Approx(1.25));
  // strictly between 0 and 1 in the transition band, monotone
  double prev = 1.0;
  for (int i = 1; i < 40; ++i) {
    const double r = 1.0 + 0.25 * i / 40.0;
    const double c = chi(r);
    CHECK(c > 0.0);
    CHECK(c < 1.0);
    CHECK(c <= prev + 1e-15);
    prev = c;
  }
}

TEST_CASE("cutoff leaves the potential invariant exactly") {
  MatrixPotential v;
  const CutoffProfile chi = make_cutoff(v.R0, 0.25);
  for (const double r : {0.0, 0.3, 0.7, 0.99, 1.0, 1.1, 1.3}) {
    const Vec3 x(r, 0.0, 0.0);
    const Mat4 vm = sample_potential(v, x);
    CHECK(((chi(r) * vm) - vm).norm() == 0.0);
  }
}

TEST_CASE("cutoff transition is C^2: quintic smoothstep differences") {
  const CutoffProfile chi = make_cutoff(1.0, 0.25);
  // the quintic has zero curvature at both joins, so the centered second
  // difference must stay bounded and shrink roughly linearly in h there (a
  // C^1-only join would blow up like 1/h^2 instead)
  for (const double r0 : {1.0, 1.25}) {
    const double d3 = (chi(r0 + 1e-3) - 2.0 * chi(r0) + chi(r0 - 1e-3)) / 1e-6;
    const double d4 = (chi(r0 + 1e-4) - 2.0 * chi(r0) + chi(r0 - 1e-4)) / 1e-8;
    CHECK(std::abs(d3) < 1.0);
    CHECK(std::abs(d4) < 0.3 * std::abs(d3) + 1e-12);
  }
  // inside the transition the second difference converges to the actual
  // curvature, which is far from zero
  const double m = 1.0625;
  const double dd3 = (chi(m + 1e-3) - 2.0 * chi(m) + chi(m - 1e-3)) / 1e-6;
  const double dd4 = (chi(m + 1e-4) - 2.0 * chi(m) + chi(m - 1e-4)) / 1e-8;
  CHECK(std::abs(dd3) > 10.0);
  CHECK(std::abs(dd4 - dd3) < 0.01 * std::abs(dd3));
}
