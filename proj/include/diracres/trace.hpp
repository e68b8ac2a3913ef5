#pragma once

// Pairing both sides of the wave-trace identity against smooth bump test
// functions supported away from t = 0: the cosine transform and its
// derivative, the resonance-sum side with its truncation-tail estimate, the
// spectral-shift side via the shift curve, the gap-branch diagnostic, and
// the comparison report.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>
#include <diracres/nystrom.hpp>
#include <diracres/potential.hpp>
#include <diracres/quadrature.hpp>
#include <diracres/radial.hpp>
#include <diracres/zerosearch.hpp>

namespace diracres {

// Smooth bump in time, amplitude 1 at the center, supported on one side of
// t = 0.
struct TestFunction {
  double t0 = 3.0;
  double w = 1.0;

  double operator()(double t) const {
    const double s = (t - t0) / w;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  }
  double lower() const { return t0 - w; }
  double upper() const { return t0 + w; }
  double support_distance() const {  // inf |supp|
    return std::min(std::abs(lower()), std::abs(upper()));
  }
};

inline TestFunction make_test_function(double t0, double w) {
  if (!(w > 0.0)) throw ValidationError("test function: halfwidth must be > 0");
  if (!(t0 - w > 0.0) && !(t0 + w < 0.0))
    throw ValidationError("test function: support must avoid t = 0");
  return TestFunction{t0, w};
}

namespace trace_detail {

// Adaptive integral of phi(t) * g(t) over the support, complex-valued g.
template <class G>
Complex phi_integral(const TestFunction& phi, G&& g) {
  using boost::math::quadrature::gauss_kronrod;
  const auto re = [&](double t) { return phi(t) * std::real(g(t)); };
  const auto im = [&](double t) { return phi(t) * std::imag(g(t)); };
  const double a = phi.lower(), b = phi.upper();
  const double vr =
      gauss_kronrod<double, 61>::integrate(re, a, b, 12, 1e-13);
  const double vi =
      gauss_kronrod<double, 61>::integrate(im, a, b, 12, 1e-13);
  return Complex(vr, vi);
}

// Composite Simpson on an uneven grid (trapezoid on a trailing odd
// interval, which the graded grids place where the integrand is negligible).
inline double simpson_uneven(const std::vector<double>& x,
                             const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    throw ValidationError("simpson_uneven: bad input sizes");
  double total = 0.0;
  std::size_t i = 0;
  while (i + 2 < n) {
    const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
    total += (h0 + h1) / 6.0 *
             ((2.0 - h1 / h0) * y[i] +
              (h0 + h1) * (h0 + h1) / (h0 * h1) * y[i + 1] +
              (2.0 - h0 / h1) * y[i + 2]);
    i += 2;
  }
  if (i + 2 == n)  // one interval left
    total += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return total;
}

}  // namespace trace_detail

// f(lambda) = integral of phi(t) * 2 cos(t lambda) dt.
inline Complex cosine_transform(const TestFunction& phi, Complex lambda) {
  return trace_detail::phi_integral(
      phi, [&](double t) { return 2.0 * std::cos(t * lambda); });
}

// d/dlambda of the cosine transform.
inline Complex cosine_transform_derivative(const TestFunction& phi,
                                           Complex lambda) {
  return trace_detail::phi_integral(
      phi, [&](double t) { return -2.0 * t * std::sin(t * lambda); });
}

// integral of phi(t) * sin(t x) dt.
inline double sine_transform(const TestFunction& phi, double x) {
  return trace_detail::phi_integral(
             phi, [&](double t) { return Complex(std::sin(t * x), 0.0); })
      .real();
}

struct PairingResult {
  double rhs = 0.0;
  double tail_estimate = 0.0;
  double resonance_sum_upper = 0.0;  // contribution of Im lambda > 0 zeros
  double resonance_sum_lower = 0.0;  // contribution (with sign) of Im < 0
  double discrete_sum = 0.0;
  double imag_residual = 0.0;  // |Im| of the assembled complex sum
};

// Resonance side of the identity, truncated to |lambda| <= Lambda:
//   sum_{Im>0} m int phi (e^{-i|t| conj z} + e^{i|t| z})
// - sum_{Im<0} m int phi (e^{-i|t| z} + e^{i|t| conj z})
// + sum_{discrete} 2 m int phi cos(t x).
// The tail estimate carries the cubic counting shape with a constant fitted
// from the supplied list and the exponential margin of the nearest excluded
// resonance.
inline PairingResult resonance_pairing(const TestFunction& phi,
                                       const std::vector<Resonance>& resonances,
                                       const std::vector<Resonance>& discrete,
                                       double Lambda,
                                       double im_boundary = 0.01) {
  if (!(Lambda > 0.0))
    throw ValidationError("resonance_pairing: Lambda must be positive");
  PairingResult out;
  Complex upper(0.0, 0.0), lower(0.0, 0.0), disc(0.0, 0.0);
  double mu_excluded = std::numeric_limits<double>::infinity();
  double n_total = 0.0, r_max = 0.0;
  for (const Resonance& rz : resonances) {
    const Complex z = rz.lambda;
    n_total += rz.multiplicity;
    r_max = std::max(r_max, std::abs(z));
    if (std::abs(z) > Lambda) {
      mu_excluded = std::min(mu_excluded, std::abs(z.imag()));
      continue;
    }
    const double m = rz.multiplicity;
    if (z.imag() > 0.0) {
      upper += m * trace_detail::phi_integral(phi, [&](double t) {
        const double at = std::abs(t);
        return std::exp(-iu * at * std::conj(z)) + std::exp(iu * at * z);
      });
    } else {
      lower += m * trace_detail::phi_integral(phi, [&](double t) {
        const double at = std::abs(t);
        return std::exp(-iu * at * z) + std::exp(iu * at * std::conj(z));
      });
    }
  }
  for (const Resonance& rz : discrete) {
    disc += double(rz.multiplicity) * cosine_transform(phi, rz.lambda);
  }
  const Complex total = upper - lower + disc;
  out.resonance_sum_upper = upper.real();
  out.resonance_sum_lower = (-lower).real();
  out.discrete_sum = disc.real();
  out.rhs = total.real();
  out.imag_residual = std::abs(total.imag());

  const double cn = (n_total > 0.0 && r_max > 0.0)
                        ? n_total / (r_max * r_max * r_max)
                        : 1.0;
  const double mu =
      std::isfinite(mu_excluded) ? mu_excluded : im_boundary;
  out.tail_estimate =
      cn * Lambda * Lambda * Lambda *
      std::exp(-phi.support_distance() * mu);
  return out;
}

struct LhsResult {
  double lhs = 0.0;
  double continuous_integral = 0.0;  // -int f' xi over both half-lines
  double boundary_terms = 0.0;       // threshold terms of the by-parts step
  double discrete_sum = 0.0;
  bool threshold_warning = false;
};

namespace trace_detail {

// Quadratic least squares on the tail window of a sampled half-line curve,
// centered for conditioning.  Throws when the samples do not follow a
// quadratic there (an under-resolved curve must not be continued).
struct TailFit {
  double center = 0.0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;  // q(l) = a0 + a1 u + a2 u^2, u = l - center
  double value(double l) const {
    const double u = l - center;
    return a0 + (a1 + a2 * u) * u;
  }
};

inline TailFit fit_tail(const std::vector<double>& grid,
                        const std::vector<double>& xi, double window) {
  std::size_t i0 = 0;
  while (i0 < grid.size() && grid[i0] < grid.back() - window) ++i0;
  const std::size_t m = grid.size() - i0;
  if (m < 8)
    throw ValidationError(
        "birman_krein_pairing: too few samples in the tail window");
  TailFit fit;
  fit.center = 0.5 * (grid[i0] + grid.back());
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = grid[i0 + i] - fit.center;
    A(i, 0) = 1.0;
    A(i, 1) = u;
    A(i, 2) = u * u;
    b(i) = xi[i0 + i];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  fit.a0 = c(0);
  fit.a1 = c(1);
  fit.a2 = c(2);
  double ss = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = fit.value(grid[i0 + i]) - xi[i0 + i];
    ss += r * r;
    scale = std::max(scale, std::abs(xi[i0 + i]));
  }
  if (!(std::sqrt(ss / m) <= 0.02 * scale))
    throw ValidationError(
        "birman_krein_pairing: curve tail is not quadratic; the energy grid "
        "under-resolves the phase there");
  return fit;
}

// integral of f'(l) q(l) over (end, infinity) for a fitted quadratic q, by
// parts and then in closed form through the t-average; the oscillatory
// boundary at infinity vanishes under the smooth compactly supported weight.
inline double tail_beyond(const TestFunction& phi, const TailFit& q,
                          double end) {
  const double c2 = q.a2;
  const double c1 = q.a1 - 2.0 * q.a2 * q.center;
  const Complex rest = phi_integral(phi, [&](double t) {
    const double s = std::sin(t * end), c = std::cos(t * end);
    return Complex(-(2.0 * c2 * end + c1) * s / t - 2.0 * c2 * c / (t * t),
                   0.0);
  });
  const double f_end = cosine_transform(phi, Complex(end, 0.0)).real();
  // -int f' q = f(end) q(end) + int f q'
  return f_end * q.value(end) + 2.0 * rest.real();
}

}  // namespace trace_detail

// Spectral-shift side: f paired against d xi by parts over both half-lines,
// plus the discrete-spectrum values.  Beyond the sampled curve each
// half-line continues by the quadratic growth fitted to its tail window,
// integrated against f' in closed form to infinity, so the pairing sees the
// transform fully decayed regardless of where the samples stop.
inline LhsResult birman_krein_pairing(const TestFunction& phi,
                                      const XiCurve& curve,
                                      const std::vector<Resonance>& discrete) {
  if (curve.grid.size() < 16)
    throw ValidationError("birman_krein_pairing: curve grid too small");
  if (!(curve.grid.back() >= 32.0))
    throw ValidationError(
        "birman_krein_pairing: curve must reach 32 to anchor the quadratic "
        "continuation");

  const std::size_t n = curve.grid.size();
  std::vector<double> fp(n);
  for (std::size_t i = 0; i < n; ++i)
    fp[i] =
        cosine_transform_derivative(phi, Complex(curve.grid[i], 0.0)).real();

  // f' is odd, so the negative half-line reuses -fp.
  std::vector<double> integrand_p(n), integrand_m(n);
  for (std::size_t i = 0; i < n; ++i) {
    integrand_p[i] = fp[i] * curve.xi_pos[i];
    integrand_m[i] = -fp[i] * curve.xi_neg[i];
  }
  const double I_p = trace_detail::simpson_uneven(curve.grid, integrand_p);
  const double I_m = trace_detail::simpson_uneven(curve.grid, integrand_m);

  const double window = 16.0;
  const trace_detail::TailFit q_pos =
      trace_detail::fit_tail(curve.grid, curve.xi_pos, window);
  const trace_detail::TailFit q_neg =
      trace_detail::fit_tail(curve.grid, curve.xi_neg, window);
  const double end = curve.grid.back();
  const double tail = trace_detail::tail_beyond(phi, q_pos, end) -
                      trace_detail::tail_beyond(phi, q_neg, end);

  const double f1 = cosine_transform(phi, Complex(1.0, 0.0)).real();
  LhsResult out;
  out.boundary_terms =
      -f1 * curve.xi_threshold_pos + f1 * curve.xi_threshold_neg;
  out.continuous_integral = -I_p - I_m + tail;
  for (const Resonance& rz : discrete)
    out.discrete_sum += rz.multiplicity *
                        cosine_transform(phi, rz.lambda).real();
  out.lhs = out.boundary_terms + out.continuous_integral + out.discrete_sum;
  out.threshold_warning =
      std::abs(curve.xi_pos.front() - curve.xi_threshold_pos) > 0.5 ||
      std::abs(curve.xi_neg.front() - curve.xi_threshold_neg) > 0.5;
  return out;
}

// Contribution of the spectral-gap branch difference, paired against the
// sine transform; the endpoint inverse-square-root singularity is removed
// by the x = sin(theta) substitution.  Reported as a diagnostic alongside
// the comparison (it refines, but is not part of, the resonance-sum side).
inline double gap_correction(const TestFunction& phi, const MatrixPotential& V,
                             int kappa_max = 14, int theta_samples = 481,
                             const RadialOptions& ropt = {}) {
  if (theta_samples < 9)
    throw ValidationError("gap_correction: too few samples");
  const double dth = pi / (theta_samples - 1);
  double total = 0.0;
  for (int i = 1; i + 1 < theta_samples; ++i) {
    const double th = -0.5 * pi + i * dth;
    const double x = std::sin(th), jac = std::cos(th);
    const double H = gap_log_derivative(V, x, kappa_max, 1e-4, ropt);
    total += sine_transform(phi, x) * H * jac;
  }
  return total * dth / pi;
}

struct TraceReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rhs_tail_estimate = 0.0;
  double truncation_radius = 0.0;
  // breakdown
  double continuous_integral = 0.0;
  double boundary_terms = 0.0;
  double discrete_sum_lhs = 0.0;
  double resonance_sum_upper = 0.0;
  double resonance_sum_lower = 0.0;
  double discrete_sum_rhs = 0.0;
  double gap_diagnostic = 0.0;  // reported, not folded into rhs
  // verdict
  double difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool threshold_warning = false;
  double imag_residual = 0.0;
};

inline TraceReport compare_trace(const TestFunction& phi, const XiCurve& curve,
                                 const std::vector<Resonance>& resonances,
                                 const std::vector<Resonance>& discrete,
                                 double Lambda,
                                 double discretization_budget = 0.0,
                                 double gap_diagnostic = 0.0) {
  const LhsResult L = birman_krein_pairing(phi, curve, discrete);
  const PairingResult R =
      resonance_pairing(phi, resonances, discrete, Lambda);
  TraceReport rep;
  rep.lhs = L.lhs;
  rep.rhs = R.rhs;
  rep.rhs_tail_estimate = R.tail_estimate;
  rep.truncation_radius = Lambda;
  rep.continuous_integral = L.continuous_integral;
  rep.boundary_terms = L.boundary_terms;
  rep.discrete_sum_lhs = L.discrete_sum;
  rep.resonance_sum_upper = R.resonance_sum_upper;
  rep.resonance_sum_lower = R.resonance_sum_lower;
  rep.discrete_sum_rhs = R.discrete_sum;
  rep.gap_diagnostic = gap_diagnostic;
  // the gap segment of the spectral integral is evaluated separately from the
  // half-line curve, so it enters the comparison alongside the pole sum
  rep.difference = rep.lhs - rep.rhs - rep.gap_diagnostic;
  rep.tolerance = std::max(0.1 * std::abs(rep.lhs),
                           R.tail_estimate + discretization_budget);
  rep.pass = std::abs(rep.difference) <= rep.tolerance;
  rep.threshold_warning = L.threshold_warning;
  rep.imag_residual = R.imag_residual;
  return rep;
}

// Hypothesis diagnostic: smallest |det(I + K)| on small circles around the
// thresholds, sampled on both branches.  A value above the floor supports
// the no-threshold-resonance assumption.
inline double threshold_clearance(const MatrixPotential& V,
                                  const CutoffProfile& chi,
                                  const VolumeQuadrature& quad,
                                  double radius = 0.05, int samples = 8) {
  double lo = std::numeric_limits<double>::infinity();
  for (const double center : {1.0, -1.0}) {
    for (int i = 0; i < samples; ++i) {
      const double th = 2.0 * pi * i / samples;
      const Complex z =
          center + radius * Complex(std::cos(th), std::sin(th));
      for (const Sheet sheet : {Sheet::Physical, Sheet::Second}) {
        const NystromOperator K = assemble_K(sheeted(z, sheet), V, chi, quad);
        lo = std::min(lo, std::abs(fredholm_det(K)));
      }
    }
  }
  return lo;
}

}  // namespace diracres
