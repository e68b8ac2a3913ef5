#pragma once

// Partial-wave reduction for spherically symmetric electric potentials:
// channel data, regular-solution integration, Jost functions, per-channel
// resonance and bound-state search, the spectral-shift curve along the
// continuous spectrum, and the gap log-derivative difference between the
// two branches.  Serves as the independent precision reference for the
// volume-discretized route.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>
#include <diracres/potential.hpp>
#include <diracres/zerosearch.hpp>

namespace diracres {

struct RadialChannel {
  int kappa_index = 1;  // nonzero; sign selects the coupling branch
  int ell_upper = 1;    // angular order of the upper radial component G
  int ell_lower = 0;    // angular order of the lower radial component F
  int degeneracy = 2;   // 2|kappa_index|
};

inline RadialChannel make_channel(int kidx) {
  if (kidx == 0) throw ValidationError("radial channel index must be nonzero");
  RadialChannel ch;
  ch.kappa_index = kidx;
  if (kidx > 0) {
    ch.ell_upper = kidx;
    ch.ell_lower = kidx - 1;
  } else {
    ch.ell_upper = -kidx - 1;
    ch.ell_lower = -kidx;
  }
  ch.degeneracy = 2 * std::abs(kidx);
  return ch;
}

inline std::vector<RadialChannel> radial_reduce(const MatrixPotential& V,
                                                int kappa_max) {
  if (V.channel != PotentialChannel::ElectricI4)
    throw UnsupportedChannel(
        "radial reduction requires a scalar (identity-channel) potential");
  if (kappa_max < 1)
    throw ValidationError("radial_reduce: kappa_max must be >= 1");
  std::vector<RadialChannel> out;
  out.reserve(2 * static_cast<std::size_t>(kappa_max));
  for (int a = 1; a <= kappa_max; ++a) {
    out.push_back(make_channel(a));
    out.push_back(make_channel(-a));
  }
  return out;
}

struct JostSample {
  SpectralParameter sp;
  int channel = 1;  // kappa index
  Complex jost_value{1.0, 0.0};
  double wronskian_residual = 0.0;  // drift of the matching Wronskian in r
};

struct RadialOptions {
  double series_radius = 1e-6;   // power-series handoff radius
  double abs_tol = 1e-12;        // adaptive-stepper absolute tolerance
  double rel_tol = 1e-10;        // adaptive-stepper relative tolerance
  double wronskian_probe = 0.05; // extra fraction of R0 for the drift check (0 = skip)
  std::size_t max_steps = 2000000;
};

namespace radial_detail {

// Taylor coefficients c_m of the unit bump profile:
// exp(1 - 1/(1-x^2)) = sum_m c_m x^{2m}.  Generated from the series of
// u = 1/(1-y) (y = x^2) through w' = -u' w for w = exp(-u), then scaled by e.
inline const std::array<double, 11>& bump_profile_series() {
  static const std::array<double, 11> c = [] {
    constexpr int m = 10;
    std::array<double, m + 1> w{};
    w[0] = std::exp(-1.0);
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += (j + 1) * w[k - j];
      w[k + 1] = -s / (k + 1);
    }
    std::array<double, m + 1> out{};
    for (int k = 0; k <= m; ++k) out[k] = std::exp(1.0) * w[k];
    return out;
  }();
  return c;
}

inline double log_double_factorial_odd(int n) {
  // log (2n-1)!!
  if (n <= 0) return 0.0;
  return std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) -
         std::lgamma(n + 1.0);
}

// Spherical Hankel function of the first kind, closed finite sum.  Every
// term of the sum carries the same phase pattern of growth (the singular
// solution dominates), so the sum is cancellation-free.
inline Complex sph_hankel1(int l, Complex z) {
  Complex s(1.0, 0.0), term(1.0, 0.0);
  for (int k = 1; k <= l; ++k) {
    term *= static_cast<double>(l + k) * static_cast<double>(l - k + 1) /
            static_cast<double>(k) / (Complex(0.0, -2.0) * z);
    s += term;
  }
  static const Complex minus_i_pow[4] = {Complex(1, 0), Complex(0, -1),
                                         Complex(-1, 0), Complex(0, 1)};
  return minus_i_pow[(l + 1) % 4] * std::exp(iu * z) / z * s;
}

constexpr int kSeriesOrder = 6;  // terms beyond the leading power

// Scaled regular solution (G, F)/r^{|kidx|} at r0 from the power series.
// The leading component has unit leading coefficient.
inline std::array<Complex, 2> series_init(Complex lam, int kidx, double r0,
                                          double g, double R0) {
  const auto& base = bump_profile_series();
  std::array<double, kSeriesOrder> vt{};  // v(r) = sum vt[m] r^{2m}
  double scale = 1.0;
  for (int m = 0; m < kSeriesOrder; ++m) {
    vt[m] = g * base[m] * scale;
    scale /= (R0 * R0);
  }
  const int k0 = std::abs(kidx);
  std::array<Complex, kSeriesOrder + 1> a{};
  std::array<Complex, kSeriesOrder> b{};
  a[0] = Complex(1.0, 0.0);
  if (kidx > 0) {
    for (int m = 0; m < kSeriesOrder; ++m) {
      Complex conv_a(0.0, 0.0);
      for (int j = 0; j <= m; ++j) conv_a += vt[j] * a[m - j];
      b[m] = ((lam + 1.0) * a[m] - conv_a) / double(2 * k0 + 1 + 2 * m);
      Complex conv_b(0.0, 0.0);
      for (int j = 0; j <= m; ++j) conv_b += vt[j] * b[m - j];
      a[m + 1] = -((lam - 1.0) * b[m] - conv_b) / double(2 * (m + 1));
    }
  } else {
    for (int m = 0; m < kSeriesOrder; ++m) {
      Complex conv_a(0.0, 0.0);
      for (int j = 0; j <= m; ++j) conv_a += vt[j] * a[m - j];
      b[m] = -((lam - 1.0) * a[m] - conv_a) / double(2 * k0 + 1 + 2 * m);
      Complex conv_b(0.0, 0.0);
      for (int j = 0; j <= m; ++j) conv_b += vt[j] * b[m - j];
      a[m + 1] = ((lam + 1.0) * b[m] - conv_b) / double(2 * (m + 1));
    }
  }
  Complex ser_lead(0.0, 0.0), ser_other(0.0, 0.0);
  double p = 1.0;
  for (int m = 0; m <= kSeriesOrder; ++m) {
    ser_lead += a[m] * p;
    if (m < kSeriesOrder) ser_other += b[m] * p * r0;
    p *= r0 * r0;
  }
  // leading power sits in F for kidx > 0 and in G for kidx < 0
  if (kidx > 0) return {ser_other, ser_lead};
  return {ser_lead, ser_other};
}

using OdeState = std::array<double, 4>;  // Re G, Im G, Re F, Im F (scaled)

struct ChannelSystem {
  Complex lam;
  int kc = 1;  // signed kappa index
  int k0 = 1;  // |kc|
  const MatrixPotential* V = nullptr;

  void operator()(const OdeState& y, OdeState& dy, double r) const {
    const Complex G(y[0], y[1]), F(y[2], y[3]);
    const double v = V->scalar(r);
    const Complex dG =
        -(double(kc + k0) / r) * G + (lam + 1.0 - v) * F;
    const Complex dF =
        (double(kc - k0) / r) * F - (lam - 1.0 - v) * G;
    dy[0] = dG.real();
    dy[1] = dG.imag();
    dy[2] = dF.real();
    dy[3] = dF.imag();
  }
};

// Integrates the scaled regular solution from the series handoff radius to
// r_end (and optionally further); returns (G, F)/r^{|kidx|} at r_end.
inline std::array<Complex, 2> integrate_regular(Complex lam, int kidx,
                                                const MatrixPotential& V,
                                                double r_start, OdeState y,
                                                double r_end,
                                                const RadialOptions& opt) {
  namespace ode = boost::numeric::odeint;
  ChannelSystem sys{lam, kidx, std::abs(kidx), &V};
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol,
                                      ode::runge_kutta_dopri5<OdeState>());
  const double dt0 =
      std::min(0.3 * r_start / (2.0 * std::abs(kidx) + 1.0), r_end - r_start);
  const std::size_t steps =
      ode::integrate_adaptive(stepper, sys, y, r_start, r_end, dt0);
  if (steps > opt.max_steps)
    throw StiffIntegration("radial channel integration exceeded step budget");
  return {Complex(y[0], y[1]), Complex(y[2], y[3])};
}

struct BoundaryData {
  Complex jost;
  double magnitude_scale;  // cancellation scale of the matching Wronskian
};

// Matches the scaled regular solution against the outgoing free solution at
// radius r, with all channel-dependent large factors handled in log space.
inline BoundaryData match_outgoing(Complex Gt, Complex Ft,
                                   const SpectralParameter& sp, int kidx,
                                   double r) {
  const RadialChannel ch = make_channel(kidx);
  const int k0 = std::abs(kidx);
  const Complex k = sp.kappa;
  const Complex zh = k * r;
  const Complex Gout = zh * sph_hankel1(ch.ell_upper, zh);
  const Complex Fout = double(kidx > 0 ? 1 : -1) * (k / (sp.lambda + 1.0)) *
                       zh * sph_hankel1(ch.ell_lower, zh);
  const Complex Wt = Gt * Fout - Ft * Gout;
  const int m = (kidx > 0) ? k0 : k0 - 1;
  const Complex L = double(m) * std::log(k) + double(k0) * std::log(r) -
                    log_double_factorial_odd(k0);
  const Complex pref = (kidx > 0) ? Complex(1.0, 0.0) : (sp.lambda + 1.0);
  const Complex amp = pref * std::exp(L) / iu;
  BoundaryData out;
  out.jost = Wt * amp;
  out.magnitude_scale =
      (std::abs(Gt * Fout) + std::abs(Ft * Gout)) * std::abs(amp);
  return out;
}

}  // namespace radial_detail

// Jost function of one channel: integrate the regular solution outward from
// the series handoff, match against the outgoing free solution at R0, and
// normalize so the free potential gives exactly 1.  The Wronskian of the two
// solutions is r-independent beyond the support, so re-matching slightly
// outside R0 measures the integration+matching error.
inline JostSample jost_function(const RadialChannel& ch,
                                const SpectralParameter& sp,
                                const MatrixPotential& V,
                                const RadialOptions& opt = {}) {
  using namespace radial_detail;
  if (V.channel != PotentialChannel::ElectricI4)
    throw UnsupportedChannel("jost_function requires a scalar potential");
  const int kidx = ch.kappa_index;
  const double eps = opt.series_radius;
  if (!(eps > 0.0) || !(eps < V.R0))
    throw ValidationError("jost_function: series radius outside (0, R0)");

  const auto w0 = series_init(sp.lambda, kidx, eps, V.g, V.R0);
  OdeState y{w0[0].real(), w0[0].imag(), w0[1].real(), w0[1].imag()};
  const auto wR =
      integrate_regular(sp.lambda, kidx, V, eps, y, V.R0, opt);
  const auto at_R0 = match_outgoing(wR[0], wR[1], sp, kidx, V.R0);

  JostSample js;
  js.sp = sp;
  js.channel = kidx;
  js.jost_value = at_R0.jost;
  js.wronskian_residual = 0.0;

  if (opt.wronskian_probe > 0.0) {
    const double r1 = V.R0 * (1.0 + opt.wronskian_probe);
    OdeState y1{wR[0].real(), wR[0].imag(), wR[1].real(), wR[1].imag()};
    const auto w1 =
        integrate_regular(sp.lambda, kidx, V, V.R0, y1, r1, opt);
    const auto at_r1 = match_outgoing(w1[0], w1[1], sp, kidx, r1);
    const double scale =
        std::max({at_R0.magnitude_scale, at_r1.magnitude_scale, 1e-300});
    js.wronskian_residual = std::abs(at_r1.jost - at_R0.jost) / scale;
  }
  return js;
}

inline Complex jost_value(int kidx, const SpectralParameter& sp,
                          const MatrixPotential& V,
                          const RadialOptions& opt = {}) {
  return jost_function(make_channel(kidx), sp, V, opt).jost_value;
}

// Resonances of the full operator via the channel decomposition: zeros of
// each channel's Jost function, carrying multiplicity 2|kidx| per zero order.
inline std::vector<Resonance> radial_resonances(const MatrixPotential& V,
                                                const SearchRegion& region,
                                                int kappa_max,
                                                const FindOptions& fopt = {},
                                                RadialOptions ropt = {}) {
  ropt.wronskian_probe = 0.0;  // bulk path: skip the drift probe
  std::vector<Resonance> all;
  for (const RadialChannel& ch : radial_reduce(V, kappa_max)) {
    const DetFn detfn = [&](Complex z) {
      return jost_value(ch.kappa_index, sheeted(z, region.sheet), V,
                        ropt);
    };
    std::vector<Resonance> rs = find_resonances(detfn, region, fopt);
    for (Resonance& r : rs) {
      r.multiplicity *= ch.degeneracy;
      r.method = Method::RadialOracle;
      r.flags.push_back("channel=" + std::to_string(ch.kappa_index));
      all.push_back(std::move(r));
    }
  }
  std::sort(all.begin(), all.end(), [](const Resonance& x, const Resonance& y) {
    if (x.lambda.real() != y.lambda.real())
      return x.lambda.real() < y.lambda.real();
    return x.lambda.imag() < y.lambda.imag();
  });
  return all;
}

// Bound states in the spectral gap via the channel decomposition.
inline std::vector<Resonance> radial_discrete_spectrum(
    const MatrixPotential& V, double lo, double hi, int kappa_max,
    const GapScanOptions& gopt = {}, RadialOptions ropt = {}) {
  ropt.wronskian_probe = 0.0;
  std::vector<Resonance> all;
  for (const RadialChannel& ch : radial_reduce(V, kappa_max)) {
    const DetFn detfn = [&](Complex z) {
      return jost_value(ch.kappa_index, sheeted(z, Sheet::Physical), V,
                        ropt);
    };
    std::vector<Resonance> rs = find_discrete_spectrum_fn(detfn, lo, hi, gopt);
    for (Resonance& r : rs) {
      r.multiplicity *= ch.degeneracy;
      r.method = Method::RadialOracle;
      r.flags.push_back("channel=" + std::to_string(ch.kappa_index));
      all.push_back(std::move(r));
    }
  }
  std::sort(all.begin(), all.end(), [](const Resonance& x, const Resonance& y) {
    return x.lambda.real() < y.lambda.real();
  });
  return all;
}

// Single-valued entire counting target: the product over channels of the
// two-branch Jost product, raised to the channel degeneracy.  Symmetric in
// the branch choice, hence free of the cut.
inline DetFn radial_counting_detfn(const MatrixPotential& V, int kappa_max,
                                   RadialOptions ropt = {}) {
  ropt.wronskian_probe = 0.0;
  const auto channels = radial_reduce(V, kappa_max);
  const MatrixPotential Vc = V;  // own a copy: the DetFn may outlive the caller
  return [=](Complex z) {
    Complex prod(1.0, 0.0);
    for (const RadialChannel& ch : channels) {
      const Complex fp =
          jost_value(ch.kappa_index, sheeted(z, Sheet::Physical), Vc,
                     ropt);
      const Complex fs =
          jost_value(ch.kappa_index, sheeted(z, Sheet::Second), Vc,
                     ropt);
      Complex factor = fp * fs;
      Complex power(1.0, 0.0);
      for (int p = 0; p < ch.degeneracy; ++p) power *= factor;
      prod *= power;
    }
    return prod;
  };
}

// ---------------------------------------------------------------------------
// Spectral shift curve along the continuous spectrum.

struct XiCurve {
  std::vector<double> grid;     // |lambda| samples, increasing, > 1
  std::vector<double> xi_pos;   // xi(+grid)
  std::vector<double> xi_neg;   // xi(-grid)
  double xi_threshold_pos = 0;  // extrapolated xi(1+)
  double xi_threshold_neg = 0;  // extrapolated xi(-1-)
};

// |lambda| grid: geometric refinement toward the threshold, fine uniform
// spacing through the oscillatory window, coarser tail out to lambda_max.
// Graded energy grid: geometric cluster at the threshold, then a uniform
// step small enough to keep every channel's phase trackable between
// samples (quasi-bound staircases near a channel's barrier top move the
// phase by ~pi over a fraction of a unit, so coarse far grids tear the
// unwrap; the tail beyond the sampled range is the pairing's job, not the
// grid's).
inline std::vector<double> default_xi_grid(double lambda_max = 48.0) {
  if (!(lambda_max > 2.0))
    throw ValidationError("default_xi_grid: lambda_max must exceed 2");
  std::vector<double> g;
  const int n_near = 140;
  for (int i = 0; i < n_near; ++i) {
    const double e =
        1e-6 * std::pow(0.5 / 1e-6, double(i) / double(n_near - 1));
    g.push_back(1.0 + e);
  }
  for (double x = 1.52; x <= lambda_max + 1e-9; x += 0.02) g.push_back(x);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

namespace radial_detail {

inline std::vector<double> unwrap_angles(const std::vector<Complex>& vals) {
  std::vector<double> ang(vals.size());
  if (vals.empty()) return ang;
  ang[0] = std::arg(vals[0]);
  for (std::size_t i = 1; i < vals.size(); ++i) {
    const double d =
        std::remainder(std::arg(vals[i]) - std::arg(vals[i - 1]), 2.0 * pi);
    ang[i] = ang[i - 1] + d;
  }
  return ang;
}

// Least-squares quadratic extrapolation to u = 0 of (u_i, y_i) data.
inline double quadratic_extrapolate_to_zero(const std::vector<double>& u,
                                            const std::vector<double>& y) {
  const std::size_t n = u.size();
  const double us = *std::max_element(u.begin(), u.end());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = u[i] / us;
    A(i, 0) = 1.0;
    A(i, 1) = t;
    A(i, 2) = t * t;
    b(i) = y[i];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  return c(0);
}

}  // namespace radial_detail

// xi on one side of the continuous spectrum (side = +1 or -1), summed over
// channels with the phase of each channel unwrapped along the grid and
// anchored to its principal value at the channel opening, where the
// centrifugal barrier keeps the phase small; the accumulated phase at the
// far end of the grid can exceed pi, so anchoring there is unsafe.
// Channels enter once the boundary momentum is within the inclusion margin
// of the channel index.
inline std::vector<double> radial_xi_side(const MatrixPotential& V, int side,
                                          const std::vector<double>& grid,
                                          int kappa_margin = 14,
                                          RadialOptions ropt = {}) {
  ropt.wronskian_probe = 0.0;
  const std::size_t n = grid.size();
  std::vector<double> kap(n), xi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(grid[i] > 1.0))
      throw ValidationError("radial_xi_side: grid values must exceed 1");
    kap[i] = std::sqrt(grid[i] * grid[i] - 1.0);
  }
  const int kmax_global =
      static_cast<int>(std::ceil(kap.back())) + kappa_margin;
  for (int a = 1; a <= kmax_global; ++a) {
    std::size_t i0 = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (kap[i] + kappa_margin >= a) {
        i0 = i;
        break;
      }
    }
    if (i0 == n) continue;
    for (const int kidx : {a, -a}) {
      std::vector<Complex> F;
      F.reserve(n - i0);
      for (std::size_t i = i0; i < n; ++i) {
        const SpectralParameter sp =
            sheeted(Complex(side * grid[i], 0.0), Sheet::Physical);
        F.push_back(jost_value(kidx, sp, V, ropt));
      }
      std::vector<double> ang = radial_detail::unwrap_angles(F);
      const double shift = std::arg(F.front()) - ang.front();
      for (std::size_t i = i0; i < n; ++i)
        xi[i] += 2.0 * a * (ang[i - i0] + shift) / pi;
    }
  }
  return xi;
}

inline XiCurve radial_xi_curve(const MatrixPotential& V,
                               const std::vector<double>& grid,
                               int kappa_margin = 14,
                               const RadialOptions& ropt = {}) {
  XiCurve c;
  c.grid = grid;
  c.xi_pos = radial_xi_side(V, +1, grid, kappa_margin, ropt);
  c.xi_neg = radial_xi_side(V, -1, grid, kappa_margin, ropt);
  const std::size_t m = std::min<std::size_t>(12, grid.size());
  std::vector<double> u(m), yp(m), yn(m);
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = std::sqrt(grid[i] - 1.0);
    yp[i] = c.xi_pos[i];
    yn[i] = c.xi_neg[i];
  }
  c.xi_threshold_pos = radial_detail::quadratic_extrapolate_to_zero(u, yp);
  c.xi_threshold_neg = radial_detail::quadratic_extrapolate_to_zero(u, yn);
  return c;
}

// Difference of logarithmic derivatives of the two-branch channel products
// across the spectral gap, summed over channels with degeneracy weights:
// H(x) = sum_kidx 2|kidx| d/dx log(F_second/F_physical)(x), computed by a
// central difference on the (real in the gap) Jost values.
inline double gap_log_derivative(const MatrixPotential& V, double x,
                                 int kappa_max = 14, double fd_step = 1e-4,
                                 RadialOptions ropt = {}) {
  ropt.wronskian_probe = 0.0;
  if (!(x > -1.0 && x < 1.0))
    throw ValidationError("gap_log_derivative: x must lie in (-1,1)");
  double out = 0.0;
  for (int a = 1; a <= kappa_max; ++a) {
    for (const int kidx : {a, -a}) {
      for (const Sheet sheet : {Sheet::Second, Sheet::Physical}) {
        const double sgn = (sheet == Sheet::Second) ? 1.0 : -1.0;
        const double Fp =
            jost_value(kidx, sheeted(Complex(x + fd_step, 0.0), sheet),
                       V, ropt)
                .real();
        const double Fm =
            jost_value(kidx, sheeted(Complex(x - fd_step, 0.0), sheet),
                       V, ropt)
                .real();
        const double F0 =
            jost_value(kidx, sheeted(Complex(x, 0.0), sheet), V, ropt)
                .real();
        out += sgn * 2.0 * a * (Fp - Fm) / (2.0 * fd_step) / F0;
      }
    }
  }
  return out;
}

}  // namespace diracres
