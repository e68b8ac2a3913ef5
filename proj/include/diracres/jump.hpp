#pragma once

// Discrete check that the resolvent's boundary-value difference across the
// continuous spectrum is a rank-structured spherical average: with cutoff chi,
//   chi (R0_phys(lambda) - R0_second(lambda)) chi = 2 pi i E_dual(lambda) E(lambda),
// where E carries plane waves restricted to the energy shell.  The residual of
// the identity on a volume quadrature measures how well the sphere rule
// resolves the shell average; it is independent of the potential.

#include <cstddef>
#include <cmath>
#include <complex>
#include <vector>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>
#include <diracres/determinant.hpp>
#include <diracres/potential.hpp>
#include <diracres/quadrature.hpp>
#include <diracres/resolvent.hpp>

namespace diracres {

// Pointwise difference of the two boundary-value kernels.  Unlike either
// kernel alone this is regular at coinciding points: the 1/r^2 and 1/r
// direction terms cancel and the limit is (beta + lambda) * 2 i kappa / (4 pi).
inline Mat4 sheet_jump_kernel(Complex lambda, const Vec3& x, const Vec3& y) {
  const auto phys = sheeted(lambda, Sheet::Physical);
  const double r = (x - y).norm();
  if (r < 1e-8) {
    const auto& A = dirac_matrices();
    Mat4 m = A.beta + lambda * Mat4::Identity();
    return (2.0 * iu * phys.kappa / (4.0 * pi)) * m;
  }
  const auto second = sheeted(lambda, Sheet::Second);
  return dirac_resolvent_kernel(phys, x, y) -
         dirac_resolvent_kernel(second, x, y);
}

// Spherical-average representation of the same difference:
//   2 pi i (2 pi)^-3 lambda kappa  int_{S^2} P(lambda, w) e^{i kappa w.(x-y)} dw
// discretized with the given sphere rule.
inline Mat4 sheet_jump_average(Complex lambda, const Vec3& x, const Vec3& y,
                               const SphereQuadrature& sphere) {
  const auto sp = sheeted(lambda, Sheet::Physical);
  const Vec3 d = x - y;
  Mat4 acc = Mat4::Zero();
  for (std::size_t k = 0; k < sphere.nodes.size(); ++k) {
    const Vec3& w = sphere.nodes[k];
    acc += (sphere.weights[k] * std::exp(iu * sp.kappa * w.dot(d))) *
           energy_projector(sp, w);
  }
  const Complex pref =
      2.0 * pi * iu * std::pow(2.0 * pi, -3) * sp.lambda * sp.kappa;
  return pref * acc;
}

struct JumpResidual {
  double jump_norm = 0.0;      // operator norm of the assembled difference
  double residual_norm = 0.0;  // norm of (difference - spherical average)
  double relative = 0.0;       // residual_norm / jump_norm
};

// Assembles M[i,j] = chi_i (K_phys - K_second)(x_i, x_j) chi_j w_j on the
// volume rule, subtracts the factorized form 2 pi i E_dual diag(nu) E by an
// in-place rank update (the matrix is large; only one copy is ever held),
// and reports operator norms before and after.
inline JumpResidual sheet_jump_residual(Complex lambda,
                                        const CutoffProfile& chi,
                                        const VolumeQuadrature& quad,
                                        const SphereQuadrature& sphere,
                                        double norm_rel_tol = 1e-5,
                                        int norm_max_iter = 300) {
  const auto sp = sheeted(lambda, Sheet::Physical);
  const int n = static_cast<int>(quad.nodes.size());
  if (n == 0) throw InvalidResolution("sheet_jump_residual: empty quadrature");
  if (4 * static_cast<std::size_t>(n) > 40000)
    throw AllocationFailure("sheet_jump_residual: 4N exceeds the 40000 guard");
  const int dim = 4 * n;
  const int ns = static_cast<int>(sphere.nodes.size());
  const int sdim = 4 * ns;

  std::vector<double> cx(n);
  for (int i = 0; i < n; ++i) cx[i] = chi(quad.nodes[i].norm());

  CMat m(dim, dim);
  for (int j = 0; j < n; ++j) {
    const double cw = cx[j] * quad.weights[j];
    for (int i = 0; i < n; ++i) {
      m.block<4, 4>(4 * i, 4 * j) =
          (cx[i] * cw) * sheet_jump_kernel(lambda, quad.nodes[i], quad.nodes[j]);
    }
  }

  JumpResidual out;
  out.jump_norm = operator_norm_dense(m, norm_rel_tol, norm_max_iter);

  // E      : (4S x 4N)  row k: c P(w_k) e^{-i kappa w_k . x_j} chi_j w_j
  // E_dual : (4N x 4S)  col k: c P(w_k) e^{+i kappa w_k . x_i} chi_i nu_k
  const Complex c = farfield_amplitude(sp);
  const double fourier = std::pow(2.0 * pi, -1.5);
  CMat e(sdim, dim), ed(dim, sdim);
  for (int k = 0; k < ns; ++k) {
    const Vec3& w = sphere.nodes[k];
    const Mat4 cp = (fourier * c) * energy_projector(sp, w);
    for (int j = 0; j < n; ++j) {
      // The dual factor carries the analytically continued exponent
      // e^{+i kappa w.x} (not the complex conjugate of the direct one).
      const Complex arg = iu * sp.kappa * w.dot(quad.nodes[j]);
      e.block<4, 4>(4 * k, 4 * j) =
          (std::exp(-arg) * cx[j] * quad.weights[j]) * cp;
      ed.block<4, 4>(4 * j, 4 * k) =
          (std::exp(arg) * cx[j] * sphere.weights[k]) * cp;
    }
  }

  // m -= 2 pi i * ed * e, accumulated in place.
  blas_gemm('N', 'N', -2.0 * pi * iu, ed, e, Complex(1.0, 0.0), m);
  e.resize(0, 0);
  ed.resize(0, 0);

  out.residual_norm = operator_norm_dense(m, norm_rel_tol, norm_max_iter);
  out.relative = out.residual_norm / std::max(out.jump_norm, 1e-300);
  return out;
}

}  // namespace diracres
