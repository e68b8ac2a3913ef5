#include <catch2/catch_amalgamated.hpp>

#include <diracres/zerosearch.hpp>

using namespace diracres;

namespace {
SearchRegion box(double a, double b, double c, double d) {
  SearchRegion r;
  r.re_min = a;
  r.re_max = b;
  r.im_min = c;
  r.im_max = d;
  return r;
}
}  // namespace

TEST_CASE("analytic counting: simple, multiple, and absent zeros") {
  const Complex z0(1.7, -0.6);
  const DetFn simple = [z0](Complex z) { return z - z0; };
  CHECK(count_zeros(simple, box(1.3, 2.1, -1.0, -0.2)) == 1);
  CHECK(count_zeros(simple, box(2.2, 3.0, -1.0, -0.2)) == 0);

  const DetFn twice = [z0](Complex z) { return (z - z0) * (z - z0); };
  CHECK(count_zeros(twice, box(1.3, 2.1, -1.0, -0.2)) == 2);

  const DetFn mixed = [z0](Complex z) {
    return (z - z0) * (z - z0) * (z - Complex(1.4, -0.4));
  };
  CHECK(count_zeros(mixed, box(1.3, 2.1, -1.0, -0.2)) == 3);

  const DetFn none = [](Complex z) { return std::exp(z) + 3.0; };
  CHECK(count_zeros(none, box(-1.0, 1.0, -1.0 - 2.0, -0.1)) == 0);
}

TEST_CASE("local order around a known zero") {
  const Complex z0(0.4, -0.9);
  const DetFn f = [z0](Complex z) { return (z - z0) * (z - z0) * std::exp(z); };
  CHECK(zero_order(f, z0, 0.05) == 2);
}

TEST_CASE("refinement turns a counted box into a certified zero") {
  const Complex z0(1.9, -0.77);
  const DetFn f = [z0](Complex z) { return (z - z0) * std::exp(0.3 * z); };
  const auto found = find_resonances(f, box(1.0, 2.5, -1.4, -0.1));
  REQUIRE(found.size() == 1);
  CHECK(std::abs(found[0].lambda - z0) < 1e-9);
  CHECK(found[0].multiplicity == 1);
  CHECK(found[0].residual < 1e-8);
  CHECK(found[0].method == Method::Nystrom);
}

TEST_CASE("several zeros are separated and refined independently") {
  const Complex a(0.6, -0.3), b(2.1, -1.1), c(1.4, -0.7);
  const DetFn f = [=](Complex z) { return (z - a) * (z - b) * (z - c); };
  const auto found = find_resonances(f, box(0.2, 2.6, -1.45, -0.05));
  REQUIRE(found.size() == 3);
  // sorted by real part
  CHECK(std::abs(found[0].lambda - a) < 1e-9);
  CHECK(std::abs(found[1].lambda - c) < 1e-9);
  CHECK(std::abs(found[2].lambda - b) < 1e-9);
}

TEST_CASE("a double zero is reported as one root of multiplicity two") {
  const Complex z0(1.3, -0.5);
  const DetFn f = [z0](Complex z) { return (z - z0) * (z - z0); };
  const auto found = find_resonances(f, box(0.8, 1.8, -1.0, -0.1));
  REQUIRE(found.size() == 1);
  CHECK(found[0].multiplicity == 2);
  CHECK(std::abs(found[0].lambda - z0) < 1e-3);
}

TEST_CASE("boundary dilation absorbs zeros sitting on the contour") {
  // zero exactly on a boundary sample of the initial right edge
  const Complex z0(2.0, -0.55);
  const DetFn f = [z0](Complex z) { return z - z0; };
  const int n = count_zeros(f, box(1.0, 2.0, -1.0, -0.1));
  CHECK(n == 1);  // a 1% dilation about the center captures it
}

TEST_CASE("a dead boundary raises the boundary-zero error") {
  const DetFn f = [](Complex z) { return (z - Complex(1.5, -0.5)) * 1e-30; };
  WindingOptions opt;
  opt.boundary_floor = 1.0;  // everything on the contour is below the floor
  CHECK_THROWS_AS(count_zeros(f, box(1.0, 2.0, -1.0, -0.1), opt),
                  BoundaryZero);
}

TEST_CASE("insufficient phase resolution is reported, not guessed") {
  SearchRegion r = box(1.5, 3.5, -2.0, 2.0);
  r.boundary_samples = 2;
  WindingOptions opt;
  opt.max_refine_depth = 0;
  const DetFn f = [](Complex z) {
    return std::exp(Complex(0.0, 8.0) * z);  // fast phase winding
  };
  CHECK_THROWS_AS(count_zeros(f, r, opt), PhaseUnresolved);
}

TEST_CASE("regions touching the thresholds are rejected") {
  CHECK_THROWS_AS(validate_region(box(0.5, 1.0005, -0.5, 0.5)),
                  ValidationError);
  CHECK_THROWS_AS(validate_region(box(-1.2, -0.9995, -0.5, 0.5)),
                  ValidationError);
  CHECK_THROWS_AS(validate_region(box(2.0, 1.0, -0.5, 0.5)), ValidationError);
  CHECK_NOTHROW(validate_region(box(1.1, 2.0, -0.5, 0.5)));
}

TEST_CASE("gap scan finds sign changes and tangential dips") {
  const DetFn f = [](Complex z) {
    return (z - 0.3) * (z + 0.5) * std::exp(-z);
  };
  const auto found = find_discrete_spectrum_fn(f, -0.9, 0.9);
  REQUIRE(found.size() == 2);
  CHECK(std::abs(found[0].lambda - Complex(-0.5, 0.0)) < 1e-8);
  CHECK(std::abs(found[1].lambda - Complex(0.3, 0.0)) < 1e-8);
  CHECK(found[0].multiplicity == 1);
  CHECK(found[0].sheet == Sheet::Physical);

  const DetFn dip = [](Complex z) { return (z - 0.2) * (z - 0.2) + 0.0; };
  const auto dips = find_discrete_spectrum_fn(dip, -0.9, 0.9);
  REQUIRE(dips.size() == 1);
  CHECK(std::abs(dips[0].lambda - Complex(0.2, 0.0)) < 1e-6);
  CHECK(dips[0].multiplicity == 2);
}

TEST_CASE("gap scan validates its interval") {
  const DetFn f = [](Complex z) { return z + 2.0; };
  CHECK_THROWS_AS(find_discrete_spectrum_fn(f, -1.2, 0.5), ValidationError);
  CHECK_THROWS_AS(find_discrete_spectrum_fn(f, 0.5, 0.2), ValidationError);
}

TEST_CASE("counting function steps at the zero moduli") {
  std::vector<Resonance> zs;
  Resonance r1;
  r1.lambda = Complex(0.5, -0.2);
  r1.multiplicity = 2;
  Resonance r2;
  r2.lambda = Complex(2.0, -1.0);
  r2.multiplicity = 4;
  zs = {r1, r2};
  CHECK(counting_function(zs, 0.4) == 0);
  CHECK(counting_function(zs, 1.0) == 2);
  CHECK(counting_function(zs, 3.0) == 6);
}

TEST_CASE("growth bound dominates the counting function") {
  const DetFn f = [](Complex z) {
    return (z - 0.5) * (z - Complex(0.0, 0.4)) * std::exp(0.2 * z);
  };
  const double bound = jensen_bound(f, 0.75);
  CHECK(bound >= 2.0);

  const DetFn at_zero = [](Complex z) { return z; };
  CHECK_THROWS_AS(jensen_bound(at_zero, 1.0), BasePointZero);
}
