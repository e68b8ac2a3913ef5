#include <catch2/catch_amalgamated.hpp>

#include <diracres/branch.hpp>

using namespace diracres;

TEST_CASE("physical branch decays above the cut and in the gap") {
  // Above the positive cut: kappa is the positive root.
  const SpectralParameter p = sheeted(Complex(2.0, 0.0), Sheet::Physical);
  CHECK(p.kappa.real() == Catch::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(std::abs(p.kappa.imag()) < 1e-14);

  // Negative cut: kappa flips sign with lambda.
  const SpectralParameter m = sheeted(Complex(-2.0, 0.0), Sheet::Physical);
  CHECK(m.kappa.real() == Catch::Approx(-std::sqrt(3.0)).epsilon(1e-14));

  // Gap: kappa = +i sqrt(1 - lambda^2), exponential decay.
  const SpectralParameter g = sheeted(Complex(0.5, 0.0), Sheet::Physical);
  CHECK(std::abs(g.kappa.real()) < 1e-14);
  CHECK(g.kappa.imag() == Catch::Approx(std::sqrt(0.75)).epsilon(1e-14));
}

TEST_CASE("second branch is the negative of the physical branch") {
  for (const Complex z : {Complex(1.7, 0.4), Complex(-2.3, -0.8),
                          Complex(0.3, 0.1), Complex(1.5, -0.2)}) {
    const Complex kp = kappa_on_sheet(z, Sheet::Physical);
    const Complex ks = kappa_on_sheet(z, Sheet::Second);
    CHECK(std::abs(kp + ks) < 1e-14 * std::abs(kp));
  }
}

TEST_CASE("kappa solves kappa^2 = lambda^2 - 1 on both branches") {
  for (const Complex z : {Complex(2.0, 1.0), Complex(-1.5, 0.3),
                          Complex(0.2, -0.7), Complex(3.0, -2.0)}) {
    for (const Sheet s : {Sheet::Physical, Sheet::Second}) {
      const Complex k = kappa_on_sheet(z, s);
      CHECK(std::abs(k * k - (z * z - 1.0)) < 1e-12 * std::abs(z * z));
    }
  }
}

TEST_CASE("physical kappa has nonnegative imaginary part off the cuts") {
  for (const Complex z :
       {Complex(1.5, 0.4), Complex(1.5, -0.4), Complex(-2.0, 0.7),
        Complex(-2.0, -0.7), Complex(0.0, 1.3), Complex(0.9, 0.0)}) {
    const Complex k = kappa_on_sheet(z, Sheet::Physical);
    CHECK(k.imag() >= -1e-14);
  }
}

TEST_CASE("cut values continue the upper half plane limits") {
  // Approaching the positive cut from above must agree with the on-cut
  // physical value; the second branch matches the limit from below.
  const Complex lam(1.8, 0.0);
  const Complex from_above = kappa_on_sheet(lam + Complex(0, 1e-9), Sheet::Physical);
  const Complex on_cut = kappa_on_sheet(lam, Sheet::Physical);
  CHECK(std::abs(from_above - on_cut) < 1e-8);

  const Complex from_below = kappa_on_sheet(lam - Complex(0, 1e-9), Sheet::Physical);
  const Complex second_on_cut = kappa_on_sheet(lam, Sheet::Second);
  CHECK(std::abs(from_below - second_on_cut) < 1e-8);
}

TEST_CASE("crossing the cut downward continues onto the second branch") {
  // Walk lambda from 1.5 + 0.2i down to 1.5 - 0.2i; the continuation of the
  // physical kappa across the cut is the second-branch value, not the
  // physical one.
  const Complex top = kappa_on_sheet(Complex(1.5, 0.2), Sheet::Physical);
  const Complex bottom_second = kappa_on_sheet(Complex(1.5, -0.2), Sheet::Second);
  // continuity of the path: kappa changes smoothly, so Re kappa keeps sign
  CHECK(top.real() > 0.0);
  CHECK(bottom_second.real() > 0.0);
  // whereas the physical value below the cut has flipped to Im > 0
  const Complex bottom_phys = kappa_on_sheet(Complex(1.5, -0.2), Sheet::Physical);
  CHECK(bottom_phys.imag() > 0.0);
  CHECK(bottom_second.imag() < 0.0);
  // the two lower values are the two branch signs of the same square root
  CHECK(std::abs(bottom_phys + bottom_second) < 1e-14 * std::abs(bottom_phys));
}

TEST_CASE("branch points are rejected") {
  CHECK_THROWS_AS(sheeted(Complex(1.0, 0.0), Sheet::Physical), BranchPoint);
  CHECK_THROWS_AS(sheeted(Complex(-1.0, 0.0), Sheet::Second), BranchPoint);
}

TEST_CASE("conjugation symmetry of the branches") {
  // Within one branch the map is Schwarz-symmetric: kappa(conj z) equals
  // the conjugate of kappa(z) up to branch sign bookkeeping on each sheet.
  for (const Complex z : {Complex(1.6, 0.5), Complex(-2.2, 1.1)}) {
    for (const Sheet s : {Sheet::Physical, Sheet::Second}) {
      const Complex a = kappa_on_sheet(std::conj(z), s);
      const Complex b = std::conj(kappa_on_sheet(z, s));
      // same square: both are roots of lambda^2 - 1
      CHECK(std::abs(a * a - b * b) < 1e-12 * std::abs(a * a));
      // and they are equal or opposite roots
      CHECK(std::min(std::abs(a - b), std::abs(a + b)) <
            1e-12 * std::abs(a));
    }
  }
}
