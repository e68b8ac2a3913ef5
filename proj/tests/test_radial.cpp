#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include <diracres/radial.hpp>
#include <support/reference_values.hpp>

using namespace diracres;

namespace {
MatrixPotential default_potential(double g = 2.0) {
  MatrixPotential v;
  v.g = g;
  return v;
}
}  // namespace

TEST_CASE("channel bookkeeping: angular labels and degeneracies") {
  const RadialChannel k1 = make_channel(1);
  CHECK(k1.ell_upper == 1);
  CHECK(k1.ell_lower == 0);
  CHECK(k1.degeneracy == 2);
  const RadialChannel km1 = make_channel(-1);
  CHECK(km1.ell_upper == 0);
  CHECK(km1.ell_lower == 1);
  CHECK(km1.degeneracy == 2);
  const RadialChannel k2 = make_channel(2);
  CHECK(k2.ell_upper == 2);
  CHECK(k2.ell_lower == 1);
  CHECK(k2.degeneracy == 4);
  const RadialChannel km2 = make_channel(-2);
  CHECK(km2.ell_upper == 1);
  CHECK(km2.ell_lower == 2);
  CHECK(km2.degeneracy == 4);
  CHECK_THROWS_AS(make_channel(0), ValidationError);
}

TEST_CASE("channel list covers +/- pairs in order") {
  const auto chans = radial_reduce(default_potential(), 3);
  REQUIRE(chans.size() == 6);
  CHECK(chans[0].kappa_index == 1);
  CHECK(chans[1].kappa_index == -1);
  CHECK(chans[4].kappa_index == 3);
  CHECK(chans[5].kappa_index == -3);
  MatrixPotential vb = default_potential();
  vb.channel = PotentialChannel::ScalarBeta;
  CHECK_THROWS_AS(radial_reduce(vb, 2), UnsupportedChannel);
}

TEST_CASE("free potential gives unit channel functions on both branches") {
  const MatrixPotential v0 = default_potential(0.0);
  for (const int kidx : {1, -1, 2, -2, 3}) {
    for (const Complex lam :
         {Complex(1.5, 0.4), Complex(-2.0, 0.8), Complex(2.5, -0.6)}) {
      for (const Sheet s : {Sheet::Physical, Sheet::Second}) {
        const Complex f = jost_value(kidx, sheeted(lam, s), v0);
        CHECK(std::abs(f - 1.0) < 1e-8);
      }
    }
  }
}

TEST_CASE("frozen channel zeros annihilate the continued functions") {
  const MatrixPotential v = default_potential();
  struct Probe {
    int kidx;
    refvals::Cplx z;
  };
  const Probe probes[] = {{1, refvals::zero_k_plus_1()},
                          {-1, refvals::zero_k_minus_1()},
                          {2, refvals::zero_k_plus_2()},
                          {-2, refvals::zero_k_minus_2()},
                          {3, refvals::zero_k_plus_3()}};
  for (const Probe& p : probes) {
    const Complex at_zero =
        jost_value(p.kidx, sheeted(p.z, Sheet::Second), v);
    const Complex off_zero =
        jost_value(p.kidx, sheeted(p.z + Complex(0.1, 0.05), Sheet::Second), v);
    CHECK(std::abs(at_zero) < 1e-9 * std::abs(off_zero));
  }
}

TEST_CASE("same-branch Schwarz symmetry of the channel functions") {
  const MatrixPotential v = default_potential();
  for (const int kidx : {1, -2, 3}) {
    for (const Complex lam : {Complex(1.7, 0.6), Complex(-1.4, -0.9)}) {
      for (const Sheet s : {Sheet::Physical, Sheet::Second}) {
        const Complex a = jost_value(kidx, sheeted(std::conj(lam), s), v);
        const Complex b = std::conj(jost_value(kidx, sheeted(lam, s), v));
        CHECK(std::abs(a - b) < 1e-10 * std::abs(b));
      }
    }
  }
}

TEST_CASE("conjugate zeros accompany every frozen zero on the same branch") {
  const MatrixPotential v = default_potential();
  const Complex z = std::conj(refvals::zero_k_plus_1());
  const Complex at_zero = jost_value(1, sheeted(z, Sheet::Second), v);
  const Complex off_zero =
      jost_value(1, sheeted(z + Complex(0.1, -0.05), Sheet::Second), v);
  CHECK(std::abs(at_zero) < 1e-9 * std::abs(off_zero));
}

TEST_CASE("integration reports a small interior-matching residual") {
  const MatrixPotential v = default_potential();
  const JostSample s =
      jost_function(make_channel(1), sheeted(Complex(1.5, 0.3), Sheet::Second), v);
  CHECK(s.wronskian_residual < 1e-8);
}

TEST_CASE("no channel zeros on the physical continuous spectrum") {
  const MatrixPotential v = default_potential();
  for (const int kidx : {1, -1, 2}) {
    double lo = 1e300;
    for (int i = 0; i <= 40; ++i) {
      const double lam = 1.05 + 1.95 * i / 40.0;
      lo = std::min(lo, std::abs(jost_value(
                            kidx, sheeted(Complex(lam, 0.0), Sheet::Physical), v)));
    }
    CHECK(lo > 1e-3);
  }
}

TEST_CASE("gap eigenvalues match the frozen references") {
  // g = 2: empty gap spectrum
  CHECK(radial_discrete_spectrum(default_potential(2.0), -0.995, 0.995, 3)
            .empty());
  for (const refvals::BoundStateRef& ref : refvals::bound_states()) {
    const auto found =
        radial_discrete_spectrum(default_potential(ref.g), -0.995, 0.995, 3);
    REQUIRE(found.size() == ref.lambdas.size());
    for (std::size_t i = 0; i < found.size(); ++i) {
      CHECK(found[i].lambda.real() ==
            Catch::Approx(ref.lambdas[i]).margin(2e-8));
      CHECK(std::abs(found[i].lambda.imag()) < 1e-14);
      CHECK(found[i].sheet == Sheet::Physical);
    }
  }
}

TEST_CASE("channel searches recover the frozen zeros with degeneracies") {
  const MatrixPotential v = default_potential();
  SearchRegion box{-2.2, -0.2, 0.01, 1.5, Sheet::Second, 14, 16};
  const auto found = radial_resonances(v, box, 2, {});
  REQUIRE(found.size() == 2);
  CHECK(std::abs(found[0].lambda - Complex(refvals::zero_k_minus_1())) < 1e-8);
  CHECK(found[0].multiplicity == 2);
  CHECK(std::abs(found[1].lambda - Complex(refvals::zero_k_plus_1())) < 1e-8);
  CHECK(found[1].multiplicity == 2);
  CHECK(found[0].method == Method::RadialOracle);
}

TEST_CASE("frozen counting data is consistent with the zero list") {
  // count both half-planes with multiplicity order * 2|kappa|
  auto count_within = [](double r) {
    int n = 0;
    for (const refvals::ChannelZero& z : refvals::deep_zeros()) {
      if (std::abs(z.lambda) <= r)
        n += 2 * z.order * 2 * std::abs(z.kappa_index);  // zero + conjugate
    }
    return n;
  };
  CHECK(count_within(1.5) == refvals::count_within_1p5());
  CHECK(count_within(2.5) == refvals::count_within_2p5());
}

TEST_CASE("shift curve is finite near threshold and decays along the cut") {
  const MatrixPotential v = default_potential();
  std::vector<double> grid;
  for (int i = 0; i < 30; ++i) grid.push_back(1.0 + 1e-3 + 0.15 * i);
  const XiCurve c = radial_xi_curve(v, grid, 8);
  REQUIRE(c.grid.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::isfinite(c.xi_pos[i]));
    CHECK(std::isfinite(c.xi_neg[i]));
  }
  CHECK(std::isfinite(c.xi_threshold_pos));
  CHECK(std::isfinite(c.xi_threshold_neg));
  // far-end values approach the principal branch anchor
  CHECK(std::abs(c.xi_pos.back()) < 0.5);
  CHECK(std::abs(c.xi_neg.back()) < 0.5);
}

TEST_CASE("gap branch log-derivative is finite and even in resolution") {
  const MatrixPotential v = default_potential();
  const double h1 = gap_log_derivative(v, 0.4, 6, 1e-4);
  const double h2 = gap_log_derivative(v, 0.4, 6, 5e-5);
  CHECK(std::isfinite(h1));
  CHECK(std::abs(h1 - h2) < 1e-3 * (1.0 + std::abs(h1)));
}
