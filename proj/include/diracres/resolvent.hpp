#pragma once

// Closed-form kernels of the free resolvent on both sheets and the
// plane-wave far-field kernels whose adjoint product expresses the jump
// of the resolvent across the continuous spectrum.

#include <cmath>

#include "diracres/branch.hpp"
#include "diracres/common.hpp"
#include "diracres/dirac_algebra.hpp"
#include "diracres/potential.hpp"

namespace diracres {

// e^{i kappa |x-y|} / (4 pi |x-y|).
inline Complex helmholtz_kernel(const SpectralParameter& sp, const Vec3& x,
                                const Vec3& y) {
  const double r = (x - y).norm();
  if (r < 1e-12) throw CoincidentPoints("helmholtz_kernel: x == y");
  return std::exp(iu * sp.kappa * r) / (4.0 * pi * r);
}

// (i alpha.r/|r|^2 + kappa alpha.r/|r| + beta + lambda) e^{i kappa |r|}/(4 pi |r|),
// r = x - y.  Satisfies (D0 + lambda) applied to the scalar kernel.
inline Mat4 dirac_resolvent_kernel(const SpectralParameter& sp, const Vec3& x,
                                   const Vec3& y) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r < 1e-12) throw CoincidentPoints("dirac_resolvent_kernel: x == y");
  const auto& A = dirac_matrices();
  Mat4 ar = Mat4::Zero();
  for (int j = 0; j < 3; ++j) ar += (d[j] / r) * A.alpha[j];
  const Complex scalar = std::exp(iu * sp.kappa * r) / (4.0 * pi * r);
  Mat4 m = (iu / r) * ar + sp.kappa * ar + A.beta;
  m += sp.lambda * Mat4::Identity();
  return scalar * m;
}

// Symbol at complex momentum kappa*omega: kappa (alpha.omega) + beta.
inline Mat4 symbol_at(Complex kappa, const Vec3& omega) {
  const auto& A = dirac_matrices();
  Mat4 m = A.beta;
  for (int j = 0; j < 3; ++j) m += kappa * omega[j] * A.alpha[j];
  return m;
}

// Holomorphic spectral projector P(lambda, omega) = (I + d0(kappa omega)/lambda)/2.
// Idempotent because (kappa omega)^2 + 1 = lambda^2; restricts to the
// positive-energy projector Pi_+ on (1, inf) and to Pi_- on (-inf, -1),
// implementing the sign(Re lambda) selection by continuation.
inline Mat4 energy_projector(const SpectralParameter& sp, const Vec3& omega) {
  if (std::abs(sp.lambda) < 1e-13)
    throw BranchPoint("energy_projector: lambda = 0");
  return 0.5 * (Mat4::Identity() + symbol_at(sp.kappa, omega) / sp.lambda);
}

// Amplitude c(lambda) with c^2 = lambda kappa(lambda) exactly; equals
// (lambda^2 (lambda^2-1))^{1/4} up to branch choice and is positive real
// on (1, inf).  The jump identity below fixes the branch.
inline Complex farfield_amplitude(const SpectralParameter& sp) {
  if (std::abs(sp.lambda) < 1e-13 || std::abs(sp.lambda - 1.0) < 1e-13 ||
      std::abs(sp.lambda + 1.0) < 1e-13)
    throw BranchPoint("farfield_amplitude: lambda in {-1, 0, 1}");
  return std::sqrt(sp.lambda * sp.kappa);
}

// Plane-wave trace kernel: row block of E_chi(lambda) at direction omega,
// evaluated at position x:
//   (2 pi)^{-3/2} c(lambda) P(lambda, omega) e^{-i kappa omega.x} chi(x).
inline Mat4 farfield_kernel(const SpectralParameter& sp, const Vec3& omega,
                            const Vec3& x, const CutoffProfile& chi) {
  const double cx = chi(x.norm());
  if (cx == 0.0) return Mat4::Zero();
  const Complex pref =
      std::pow(2.0 * pi, -1.5) * farfield_amplitude(sp) *
      std::exp(-iu * sp.kappa * omega.dot(x)) * cx;
  return pref * energy_projector(sp, omega);
}

// Kernel of the holomorphically continued adjoint E_chi(conj lambda)^*:
//   (2 pi)^{-3/2} c(lambda) P(lambda, omega) e^{+i kappa omega.x} chi(x).
// For real lambda on the cuts this is the plain adjoint of E_chi; off the
// axis it is the continuation in lambda (not the pointwise conjugate,
// which would break the translation structure of the jump identity).
inline Mat4 farfield_kernel_dual(const SpectralParameter& sp, const Vec3& omega,
                                 const Vec3& x, const CutoffProfile& chi) {
  const double cx = chi(x.norm());
  if (cx == 0.0) return Mat4::Zero();
  const Complex pref =
      std::pow(2.0 * pi, -1.5) * farfield_amplitude(sp) *
      std::exp(iu * sp.kappa * omega.dot(x)) * cx;
  return pref * energy_projector(sp, omega);
}

}  // namespace diracres
