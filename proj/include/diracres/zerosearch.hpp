#pragma once

// Zero location for analytic determinant-like functions: argument-principle
// counting on rectangles, recursive subdivision with Newton polish, a
// sign-and-dip scan for real zeros in the spectral gap (where even-order
// zeros produce no sign change), the counting function N(r), and the
// Jensen-formula upper bound on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>

namespace diracres {

using DetFn = std::function<Complex(Complex)>;

enum class Method { Nystrom, RadialOracle };

inline const char* to_string(Method m) {
  return m == Method::Nystrom ? "Nystrom" : "RadialOracle";
}

struct Resonance {
  Complex lambda;
  int multiplicity = 1;
  double residual = 0.0;  // |detfn| at the reported point
  Sheet sheet = Sheet::Second;
  Method method = Method::Nystrom;
  std::vector<std::string> flags;
  // provenance: the subdivision box that isolated this zero
  double box_re_min = 0.0, box_re_max = 0.0;
  double box_im_min = 0.0, box_im_max = 0.0;
};

struct SearchRegion {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  Sheet sheet = Sheet::Second;
  int max_depth = 14;         // quadtree subdivision limit
  int boundary_samples = 16;  // initial samples per rectangle edge

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  Complex center() const {
    return Complex(0.5 * (re_min + re_max), 0.5 * (im_min + im_max));
  }
  double diameter() const { return std::hypot(width(), height()); }
};

struct WindingOptions {
  double boundary_floor = 1e-10;  // |detfn| below this counts as a boundary zero
  double dilation = 0.01;         // relative growth per recovery attempt
  int max_dilations = 3;
  int max_refine_depth = 30;      // per-segment bisection limit
};

// The branch-point avoidance the search contract requires.
inline void validate_region(const SearchRegion& r) {
  if (!(r.re_max > r.re_min) || !(r.im_max > r.im_min))
    throw ValidationError("search region: empty rectangle");
  for (const double s : {1.0, -1.0}) {
    const double dx = std::max({r.re_min - s, s - r.re_max, 0.0});
    const double dy = std::max({r.im_min - 0.0, 0.0 - r.im_max, 0.0});
    if (std::hypot(dx, dy) < 1e-3)
      throw ValidationError("search region: closer than 1e-3 to a branch point");
  }
}

namespace detail {

struct BoundaryScan {
  int winding = 0;
  double min_abs = 0.0;  // smallest |detfn| seen on the boundary
  double max_abs = 0.0;  // largest |detfn| seen on the boundary
};

// Accumulates the phase increment along one segment, bisecting until every
// step is below pi/2.  Throws BoundaryZero on a sample under the floor and
// PhaseUnresolved when the depth budget runs out.
inline double segment_phase(const DetFn& f, Complex z1, Complex f1, Complex z2,
                            Complex f2, int depth, const WindingOptions& opt,
                            double& min_abs, double& max_abs) {
  const Complex ratio = f2 / f1;
  const double step = std::arg(ratio);
  if (std::abs(step) < 0.5 * pi) return step;
  if (depth <= 0)
    throw PhaseUnresolved("count_zeros: phase step refinement exhausted");
  const Complex zm = 0.5 * (z1 + z2);
  const Complex fm = f(zm);
  const double am = std::abs(fm);
  if (am <= opt.boundary_floor)
    throw BoundaryZero("count_zeros: boundary sample at or below the floor");
  min_abs = std::min(min_abs, am);
  max_abs = std::max(max_abs, am);
  return segment_phase(f, z1, f1, zm, fm, depth - 1, opt, min_abs, max_abs) +
         segment_phase(f, zm, fm, z2, f2, depth - 1, opt, min_abs, max_abs);
}

inline BoundaryScan boundary_scan_once(const DetFn& f, double a, double b,
                                       double c, double d, int per_edge,
                                       const WindingOptions& opt) {
  const Complex corners[4] = {Complex(a, c), Complex(b, c), Complex(b, d),
                              Complex(a, d)};
  std::vector<Complex> zs, fs;
  for (int e = 0; e < 4; ++e) {
    const Complex z0 = corners[e], z1 = corners[(e + 1) % 4];
    for (int k = 0; k < per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      zs.push_back(z0 + t * (z1 - z0));
    }
  }
  BoundaryScan scan;
  scan.min_abs = std::numeric_limits<double>::infinity();
  scan.max_abs = 0.0;
  fs.reserve(zs.size());
  for (const Complex& z : zs) {
    const Complex v = f(z);
    const double av = std::abs(v);
    if (av <= opt.boundary_floor)
      throw BoundaryZero("count_zeros: boundary sample at or below the floor");
    scan.min_abs = std::min(scan.min_abs, av);
    scan.max_abs = std::max(scan.max_abs, av);
    fs.push_back(v);
  }
  double total = 0.0;
  const std::size_t n = zs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t k2 = (k + 1) % n;
    total += segment_phase(f, zs[k], fs[k], zs[k2], fs[k2],
                           opt.max_refine_depth, opt, scan.min_abs,
                           scan.max_abs);
  }
  const double turns = total / (2.0 * pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.25)
    throw PhaseUnresolved("count_zeros: winding sum far from an integer");
  scan.winding = static_cast<int>(rounded);
  return scan;
}

// Dilation-recovering boundary scan about the rectangle's center.
inline BoundaryScan boundary_scan(const DetFn& f, double a, double b, double c,
                                  double d, int per_edge,
                                  const WindingOptions& opt) {
  const double cx = 0.5 * (a + b), cy = 0.5 * (c + d);
  for (int attempt = 0; attempt <= opt.max_dilations; ++attempt) {
    const double grow = 1.0 + opt.dilation * attempt;
    try {
      return boundary_scan_once(f, cx + grow * (a - cx), cx + grow * (b - cx),
                                cy + grow * (c - cy), cy + grow * (d - cy),
                                per_edge, opt);
    } catch (const BoundaryZero&) {
      if (attempt == opt.max_dilations) throw;
    }
  }
  throw BoundaryZero("count_zeros: unreachable");
}

}  // namespace detail

// Number of zeros (with multiplicity) of detfn inside the region, by the
// argument principle along the rectangle boundary.
inline int count_zeros(const DetFn& detfn, const SearchRegion& region,
                       const WindingOptions& opt = {}) {
  validate_region(region);
  return detail::boundary_scan(detfn, region.re_min, region.re_max,
                               region.im_min, region.im_max,
                               region.boundary_samples, opt)
      .winding;
}

// Winding of detfn around a small square centered at z0 — the zero order.
inline int zero_order(const DetFn& detfn, Complex z0, double radius,
                      const WindingOptions& opt = {}) {
  WindingOptions o = opt;
  return detail::boundary_scan(detfn, z0.real() - radius, z0.real() + radius,
                               z0.imag() - radius, z0.imag() + radius, 8, o)
      .winding;
}

struct FindOptions {
  double min_box = 1e-4;        // smallest subdivision box edge
  double newton_rel_tol = 1e-8; // target |detfn| relative to the local scale
  int newton_max_iter = 60;
  WindingOptions winding;
};

// Recursive quadtree subdivision driven by count_zeros, Newton polish on
// single-zero leaves (central-difference derivative with step 1e-3 x box
// diameter, halved on overshoot), clusters reported at minimum box size.
inline std::vector<Resonance> find_resonances(const DetFn& detfn,
                                              const SearchRegion& region,
                                              const FindOptions& opt = {}) {
  validate_region(region);
  std::vector<Resonance> found;
  std::vector<SearchRegion> stack{region};
  std::vector<int> depth_stack{0};

  auto emit = [&](const SearchRegion& box, Complex z, int mult, double resid,
                  std::vector<std::string> flags) {
    Resonance r;
    r.lambda = z;
    r.multiplicity = mult;
    r.residual = resid;
    r.sheet = region.sheet;
    r.flags = std::move(flags);
    if (mult > 1) r.flags.push_back("order>1:winding-multiplicity");
    r.box_re_min = box.re_min;
    r.box_re_max = box.re_max;
    r.box_im_min = box.im_min;
    r.box_im_max = box.im_max;
    found.push_back(std::move(r));
  };

  while (!stack.empty()) {
    SearchRegion box = stack.back();
    stack.pop_back();
    const int depth = depth_stack.back();
    depth_stack.pop_back();

    const detail::BoundaryScan scan = detail::boundary_scan(
        detfn, box.re_min, box.re_max, box.im_min, box.im_max,
        box.boundary_samples, opt.winding);
    if (scan.winding == 0) continue;

    const double diam = box.diameter();
    const bool at_min =
        box.width() <= opt.min_box || box.height() <= opt.min_box;
    const bool at_depth = depth >= box.max_depth;

    if (scan.winding == 1) {
      // Newton from the box center, damped, confined to the box vicinity.
      const double scale = std::max(scan.max_abs, 1e-300);
      Complex z = box.center();
      Complex fz = detfn(z);
      bool ok = false;
      const double h = 1e-3 * diam;
      for (int it = 0; it < opt.newton_max_iter; ++it) {
        if (std::abs(fz) <= opt.newton_rel_tol * scale) {
          ok = true;
          break;
        }
        const Complex df =
            (detfn(z + h) - detfn(z - h)) / (2.0 * h);
        if (df == Complex(0.0, 0.0)) break;
        Complex step = -fz / df;
        // keep iterates from leaving the box neighborhood
        const double cap = 0.75 * diam;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        Complex zn = z + step;
        Complex fn = detfn(zn);
        int halvings = 0;
        while (std::abs(fn) >= std::abs(fz) && halvings < 45) {
          step *= 0.5;
          zn = z + step;
          fn = detfn(zn);
          ++halvings;
        }
        if (halvings == 45) break;  // stagnated
        z = zn;
        fz = fn;
      }
      const bool inside =
          z.real() >= box.re_min - 0.25 * box.width() &&
          z.real() <= box.re_max + 0.25 * box.width() &&
          z.imag() >= box.im_min - 0.25 * box.height() &&
          z.imag() <= box.im_max + 0.25 * box.height();
      if (ok && inside) {
        emit(box, z, 1, std::abs(fz), {});
        continue;
      }
      if (at_depth || at_min) {
        emit(box, z, 1, std::abs(fz), {"no_convergence"});
        continue;
      }
      // fall through to subdivision
    } else if (at_min || at_depth) {
      std::vector<std::string> flags{"cluster"};
      if (at_depth && !at_min) flags.push_back("depth_exhausted");
      emit(box, box.center(), scan.winding,
           std::abs(detfn(box.center())), std::move(flags));
      continue;
    }

    const double mx = 0.5 * (box.re_min + box.re_max);
    const double my = 0.5 * (box.im_min + box.im_max);
    for (int q = 0; q < 4; ++q) {
      SearchRegion child = box;
      (q & 1 ? child.re_min : child.re_max) = mx;
      (q & 2 ? child.im_min : child.im_max) = my;
      stack.push_back(child);
      depth_stack.push_back(depth + 1);
    }
  }

  std::sort(found.begin(), found.end(), [](const Resonance& x,
                                           const Resonance& y) {
    if (x.lambda.real() != y.lambda.real())
      return x.lambda.real() < y.lambda.real();
    return x.lambda.imag() < y.lambda.imag();
  });
  // A zero on a shared child edge is recovered by both dilated children;
  // collapse such duplicates, keeping the better residual.
  std::vector<Resonance> merged;
  for (Resonance& r : found) {
    if (!merged.empty()) {
      Resonance& p = merged.back();
      const double tol = 1e-6 * (1.0 + std::abs(r.lambda));
      if (std::abs(r.lambda - p.lambda) <= tol) {
        if (r.residual < p.residual) {
          r.flags.insert(r.flags.end(), p.flags.begin(), p.flags.end());
          p = std::move(r);
        }
        continue;
      }
    }
    merged.push_back(std::move(r));
  }
  return merged;
}

struct GapScanOptions {
  int samples = 81;
  double position_tol = 1e-10;   // bracket width for bisection / golden section
  double contour_radius = 2e-3;  // multiplicity-confirming winding square
  int newton_max_iter = 80;
  WindingOptions winding;
};

// Real zeros of detfn on an interval inside the spectral gap.  The scan keys
// on sign changes of Re detfn and on local minima of |detfn|: gap eigenvalues
// of even multiplicity leave no sign change, so dips are confirmed or
// discarded by a small winding contour, which also supplies the multiplicity.
inline std::vector<Resonance> find_discrete_spectrum_fn(
    const DetFn& detfn, double lo, double hi,
    const GapScanOptions& opt = {}) {
  if (!(lo < hi) || lo <= -1.0 || hi >= 1.0)
    throw ValidationError("discrete-spectrum interval must sit inside (-1,1)");
  const int n = std::max(opt.samples, 5);
  std::vector<double> xs(n), fabsv(n), fre(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    const Complex v = detfn(Complex(xs[i], 0.0));
    fabsv[i] = std::abs(v);
    fre[i] = v.real();
  }

  std::vector<double> candidates;
  // sign changes of the real part: bisection
  for (int i = 0; i + 1 < n; ++i) {
    if (fre[i] == 0.0) {
      candidates.push_back(xs[i]);
      continue;
    }
    if (fre[i] * fre[i + 1] < 0.0) {
      double a = xs[i], b = xs[i + 1], fa = fre[i];
      while (b - a > opt.position_tol) {
        const double m = 0.5 * (a + b);
        const double fm = detfn(Complex(m, 0.0)).real();
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if (fa * fm < 0.0)
          b = m;
        else {
          a = m;
          fa = fm;
        }
      }
      candidates.push_back(0.5 * (a + b));
    }
  }
  // interior minima of |detfn|: golden-section refinement
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 1; i + 1 < n; ++i) {
    if (!(fabsv[i] < fabsv[i - 1] && fabsv[i] < fabsv[i + 1])) continue;
    double a = xs[i - 1], b = xs[i + 1];
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = std::abs(detfn(Complex(x1, 0.0)));
    double f2 = std::abs(detfn(Complex(x2, 0.0)));
    while (b - a > opt.position_tol) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = std::abs(detfn(Complex(x1, 0.0)));
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = std::abs(detfn(Complex(x2, 0.0)));
      }
    }
    candidates.push_back(0.5 * (a + b));
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<Resonance> out;
  for (const double x : candidates) {
    if (!out.empty() &&
        std::abs(x - out.back().lambda.real()) < 10.0 * opt.contour_radius)
      continue;  // duplicate of the previous candidate
    const double rad =
        std::min(opt.contour_radius,
                 0.25 * std::min(x - (-1.0 + 1e-3), (1.0 - 1e-3) - x));
    int order = 0;
    try {
      order = zero_order(detfn, Complex(x, 0.0), rad, opt.winding);
    } catch (const NumericalError&) {
      order = 0;  // treat an unresolvable contour as no confirmed zero
    }
    if (order <= 0) continue;  // dip without a zero
    Resonance r;
    r.lambda = Complex(x, 0.0);
    r.multiplicity = order;
    r.residual = std::abs(detfn(Complex(x, 0.0)));
    r.sheet = Sheet::Physical;
    r.box_re_min = x - rad;
    r.box_re_max = x + rad;
    r.box_im_min = -rad;
    r.box_im_max = rad;
    out.push_back(std::move(r));
  }
  return out;
}

// Sum of multiplicities within the closed disk of radius r.
inline int counting_function(const std::vector<Resonance>& zeros, double r) {
  int total = 0;
  for (const Resonance& z : zeros)
    if (std::abs(z.lambda) <= r) total += z.multiplicity;
  return total;
}

// Jensen-formula upper bound on the zero count in |lambda| <= r for an
// analytic detfn nonvanishing at 0: the circle mean of log|detfn| at radius
// 2r minus log|detfn(0)|, divided by log 2.  Trapezoidal in angle, sample
// count doubled from 64 until the value is stable to 1%.
inline double jensen_bound(const DetFn& detfn, double r,
                           int initial_samples = 64) {
  const double f0 = std::abs(detfn(Complex(0.0, 0.0)));
  if (!(f0 > 1e-300))
    throw BasePointZero("jensen_bound: detfn vanishes at the base point");
  const double lf0 = std::log(f0);

  std::vector<double> logs;  // log|detfn| at angles 2 pi k / m, nested in m
  auto value_at = [&](int m) {
    // refill preserving previously computed samples at even positions
    std::vector<double> next(m);
    for (int k = 0; k < m; ++k) {
      if (!logs.empty() && k % 2 == 0 &&
          static_cast<int>(logs.size()) * 2 == m) {
        next[k] = logs[k / 2];
        continue;
      }
      const double th = 2.0 * pi * k / m;
      const Complex z = 2.0 * r * Complex(std::cos(th), std::sin(th));
      next[k] = std::log(std::abs(detfn(z)));
    }
    logs = std::move(next);
    double mean = 0.0;
    for (const double v : logs) mean += v;
    mean /= m;
    return (mean - lf0) / std::log(2.0);
  };

  int m = std::max(initial_samples, 64);
  double prev = value_at(m);
  for (int round = 0; round < 8; ++round) {
    m *= 2;
    const double cur = value_at(m);
    if (std::abs(cur - prev) <= 0.01 * std::max(std::abs(cur), 1e-12))
      return cur;
    prev = cur;
  }
  throw NumericalError("jensen_bound: circle mean failed to stabilize");
}

}  // namespace diracres
