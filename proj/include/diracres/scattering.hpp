#pragma once

// Far-field operators from volume nodes to sphere nodes, the discretized
// scattering matrix S(lambda) and its determinant, unitarity diagnostics,
// and the spectral shift function along the continuous spectrum.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <lapacke.h>

#include <diracres/branch.hpp>
#include <diracres/common.hpp>
#include <diracres/determinant.hpp>
#include <diracres/dirac_algebra.hpp>
#include <diracres/nystrom.hpp>
#include <diracres/potential.hpp>
#include <diracres/quadrature.hpp>
#include <diracres/resolvent.hpp>

namespace diracres {

struct FarFieldOperator {
  CMat matrix;             // 4M x 4n (direct) or 4n x 4M (dual)
  SpectralParameter sp;
  std::vector<int> nodes;  // volume node indices behind the n blocks
};

namespace scattering_detail {

inline std::vector<int> all_nodes(const VolumeQuadrature& quad) {
  std::vector<int> idx(quad.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  return idx;
}

}  // namespace scattering_detail

// Rows map cutoff-weighted volume data to sphere samples: block (k, j) is
// farfield_kernel(sp, w_k, x_j) * w_j (the kernel folds in chi).
inline FarFieldOperator assemble_E(const SpectralParameter& sp,
                                   const CutoffProfile& chi,
                                   const VolumeQuadrature& quad,
                                   const SphereQuadrature& sphere,
                                   std::vector<int> subset = {}) {
  if (subset.empty()) subset = scattering_detail::all_nodes(quad);
  const std::size_t m = sphere.nodes.size(), n = subset.size();
  FarFieldOperator op;
  op.sp = sp;
  op.nodes = subset;
  op.matrix = CMat(4 * m, 4 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const int idx = subset[j];
    const Vec3& x = quad.nodes[idx];
    const double w = quad.weights[idx];
    for (std::size_t k = 0; k < m; ++k) {
      op.matrix.block<4, 4>(4 * k, 4 * j) =
          w * farfield_kernel(sp, sphere.nodes[k], x, chi);
    }
  }
  return op;
}

// The analytically continued adjoint: block (j, k) is
// farfield_kernel_dual(sp, w_k, x_j) * nu_k (the kernel folds in chi).  At
// real lambda this is the true adjoint of assemble_E with respect to the
// weighted inner products; at complex lambda the exponent continues rather
// than conjugates.
inline FarFieldOperator assemble_E_dual(const SpectralParameter& sp,
                                        const CutoffProfile& chi,
                                        const VolumeQuadrature& quad,
                                        const SphereQuadrature& sphere,
                                        std::vector<int> subset = {}) {
  if (subset.empty()) subset = scattering_detail::all_nodes(quad);
  const std::size_t m = sphere.nodes.size(), n = subset.size();
  FarFieldOperator op;
  op.sp = sp;
  op.nodes = subset;
  op.matrix = CMat(4 * n, 4 * m);
  for (std::size_t j = 0; j < n; ++j) {
    const int idx = subset[j];
    const Vec3& x = quad.nodes[idx];
    for (std::size_t k = 0; k < m; ++k) {
      op.matrix.block<4, 4>(4 * j, 4 * k) =
          sphere.weights[k] *
          farfield_kernel_dual(sp, sphere.nodes[k], x, chi);
    }
  }
  return op;
}

struct ScatteringSample {
  double lambda = 0.0;
  CMat S;                  // 4M x 4M, weight-symmetrized
  Complex s{1.0, 0.0};     // det of the stored S
  double xi = 0.0;         // -arg(s)/(2 pi), principal value
  double unitarity_residual = 0.0;  // ||S S^H - I||, 0 if not evaluated
};

// Core assembly at an arbitrary spectral parameter (used both for the
// boundary value lambda + i0 and for the meromorphic continuation):
//   S = I - 2 pi i * E (I + V R0 chi)^{-1} V E_dual
// restricted to the potential support, then weight-symmetrized to
// nu^{1/2} S nu^{-1/2}.
inline ScatteringSample scattering_matrix_at(const SpectralParameter& sp,
                                             const MatrixPotential& V,
                                             const CutoffProfile& chi,
                                             const VolumeQuadrature& quad,
                                             const SphereQuadrature& sphere,
                                             bool with_unitarity = true) {
  NystromOperator K = assemble_K(sp, V, chi, quad);
  const int n = static_cast<int>(K.active.size());
  const int m4 = static_cast<int>(4 * sphere.nodes.size());
  ScatteringSample out;
  out.lambda = sp.lambda.real();

  if (n == 0 || V.g == 0.0) {  // free potential: S = I exactly
    out.S = CMat::Identity(m4, m4);
    out.s = Complex(1.0, 0.0);
    return out;
  }

  FarFieldOperator E = assemble_E(sp, chi, quad, sphere, K.active);
  FarFieldOperator Ed = assemble_E_dual(sp, chi, quad, sphere, K.active);

  // right-hand side V * E_dual, block-diagonal potential application
  CMat Y = std::move(Ed.matrix);
  for (int a = 0; a < n; ++a) {
    const Mat4 v = sample_potential(V, quad.nodes[K.active[a]]);
    Y.middleRows<4>(4 * a) = v * Y.middleRows<4>(4 * a);
  }

  const int n4 = 4 * n;
  CMat A = std::move(K.matrix);
  A += CMat::Identity(n4, n4);
  const double anorm = LAPACKE_zlange(
      LAPACK_COL_MAJOR, '1', n4, n4,
      reinterpret_cast<const lapack_complex_double*>(A.data()), n4);
  std::vector<lapack_int> ipiv(n4);
  lapack_int info = LAPACKE_zgetrf(
      LAPACK_COL_MAJOR, n4, n4,
      reinterpret_cast<lapack_complex_double*>(A.data()), n4, ipiv.data());
  if (info > 0)
    throw NearResonanceIllConditioned(
        "scattering_matrix: I + K singular at working precision");
  if (info < 0) throw NumericalError("scattering_matrix: zgetrf argument");
  double rcond = 0.0;
  LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n4,
                 reinterpret_cast<const lapack_complex_double*>(A.data()), n4,
                 anorm, &rcond);
  if (rcond < 1e-10)
    throw NearResonanceIllConditioned(
        "scattering_matrix: condition number of I + K exceeds 1e10");
  info = LAPACKE_zgetrs(
      LAPACK_COL_MAJOR, 'N', n4, m4,
      reinterpret_cast<const lapack_complex_double*>(A.data()), n4,
      ipiv.data(), reinterpret_cast<lapack_complex_double*>(Y.data()), n4);
  if (info != 0) throw NumericalError("scattering_matrix: zgetrs failed");

  out.S = CMat::Identity(m4, m4);
  blas_gemm('N', 'N', -2.0 * pi * iu, E.matrix, Y, Complex(1.0, 0.0), out.S);

  // weight symmetrization nu^{1/2} S nu^{-1/2}
  const std::size_t ms = sphere.nodes.size();
  std::vector<double> root(ms);
  for (std::size_t k = 0; k < ms; ++k) root[k] = std::sqrt(sphere.weights[k]);
  for (std::size_t k = 0; k < ms; ++k)
    for (std::size_t l = 0; l < ms; ++l)
      out.S.block<4, 4>(4 * k, 4 * l) *= root[k] / root[l];

  const LogDet ld = logdet_lu(out.S);
  out.s = ld.value();
  out.xi = -ld.arg / (2.0 * pi);

  if (with_unitarity) {
    CMat R = CMat::Identity(m4, m4);
    blas_gemm('N', 'C', Complex(1.0, 0.0), out.S, out.S, Complex(-1.0, 0.0),
              R);
    out.unitarity_residual = operator_norm_dense(R, 1e-6, 300);
  }
  return out;
}

// Boundary value lambda + i0 on the continuous spectrum.
inline ScatteringSample scattering_matrix(double lambda,
                                          const MatrixPotential& V,
                                          const CutoffProfile& chi,
                                          const VolumeQuadrature& quad,
                                          const SphereQuadrature& sphere) {
  if (!(std::abs(lambda) > 1.0 + 1e-3))
    throw ValidationError(
        "scattering_matrix: |lambda| must exceed 1 + 1e-3");
  return scattering_matrix_at(sheeted(Complex(lambda, 0.0), Sheet::Physical),
                              V, chi, quad, sphere);
}

inline Complex scattering_determinant(const ScatteringSample& sample) {
  return sample.s;
}

struct ShiftSample {
  double lambda = 0.0;
  Complex s{1.0, 0.0};
  double xi = 0.0;
  double unitarity_residual = 0.0;
};

// Spectral shift function on a signed grid avoiding [-1-margin, 1+margin]:
// xi = -(unwrapped arg s)/(2 pi), each half-line unwrapped separately along
// increasing |lambda| and anchored to the principal value at its largest
// |lambda| sample (where s is nearest 1).
inline std::vector<ShiftSample> spectral_shift_curve(
    const std::vector<double>& lambda_grid, const MatrixPotential& V,
    const CutoffProfile& chi, const VolumeQuadrature& quad,
    const SphereQuadrature& sphere) {
  std::vector<double> pos, neg;
  for (const double l : lambda_grid) (l > 0 ? pos : neg).push_back(l);
  std::sort(pos.begin(), pos.end());                    // increasing lambda
  std::sort(neg.begin(), neg.end(), std::greater<>());  // increasing |lambda|

  std::vector<ShiftSample> out;
  for (const std::vector<double>* side : {&pos, &neg}) {
    std::vector<ShiftSample> samples;
    std::vector<double> theta;
    for (const double l : *side) {
      const ScatteringSample sc = scattering_matrix(l, V, chi, quad, sphere);
      ShiftSample sh;
      sh.lambda = l;
      sh.s = sc.s;
      sh.unitarity_residual = sc.unitarity_residual;
      samples.push_back(sh);
      const double raw = std::arg(sc.s);
      if (theta.empty()) {
        theta.push_back(raw);
      } else {
        const double step = std::remainder(raw - theta.back(), 2.0 * pi);
        if (std::abs(step) >= 0.5 * pi)
          throw PhaseUnresolved(
              "spectral_shift_curve: adjacent phase step >= pi/2; refine "
              "the grid");
        theta.push_back(theta.back() + step);
      }
    }
    if (!theta.empty()) {
      const double shift = std::arg(samples.back().s) - theta.back();
      for (std::size_t i = 0; i < theta.size(); ++i)
        samples[i].xi = -(theta[i] + shift) / (2.0 * pi);
    }
    out.insert(out.end(), samples.begin(), samples.end());
  }
  std::sort(out.begin(), out.end(), [](const ShiftSample& a,
                                       const ShiftSample& b) {
    return a.lambda < b.lambda;
  });
  return out;
}

// Pointwise consistency of the two far-field representations: conjugating
// the energy projector by the free-field diagonalizing transform at the
// on-shell momentum must equal the band projector on the transformed side:
//   G(kappa w) P(w) = (1/2)(I + sign(lambda) beta) G(kappa w).
inline double fw_farfield_residual(const SpectralParameter& sp,
                                   const Vec3& omega) {
  if (std::abs(sp.kappa.imag()) > 1e-12 * std::abs(sp.kappa))
    throw ValidationError("fw_farfield_residual: real momentum required");
  const double k = sp.kappa.real();
  const Mat4 G = fw_transform(k * omega);
  const Mat4 P = energy_projector(sp, omega);
  const double sgn = sp.lambda.real() > 0 ? 1.0 : -1.0;
  const Mat4 band =
      0.5 * (Mat4::Identity() + sgn * dirac_matrices().beta);
  return (G * P - band * G).norm();
}

}  // namespace diracres
