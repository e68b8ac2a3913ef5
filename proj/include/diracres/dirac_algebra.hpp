#pragma once

// Dirac matrices in the standard representation, the free symbol
// d0(xi) = alpha.xi + beta, its spectral projectors, and the unitary
// momentum-space rotation diagonalizing d0 to <xi> beta.

#include <array>
#include <cmath>

#include "diracres/common.hpp"

namespace diracres {

struct DiracAlgebra {
  std::array<Mat4, 3> alpha;
  Mat4 beta;
};

// Standard representation: beta = diag(1,1,-1,-1), alpha_j built from the
// Pauli matrices in the off-diagonal 2x2 blocks.  Entries are exactly
// representable (0, +-1, +-i), so all algebraic identities hold exactly.
inline const DiracAlgebra& dirac_matrices() {
  static const DiracAlgebra a = [] {
    DiracAlgebra d;
    using M2 = Eigen::Matrix2cd;
    M2 s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, Complex(0, -1), Complex(0, 1), 0;
    s3 << 1, 0, 0, -1;
    const std::array<M2, 3> sigma{s1, s2, s3};
    for (int j = 0; j < 3; ++j) {
      d.alpha[j].setZero();
      d.alpha[j].block<2, 2>(0, 2) = sigma[j];
      d.alpha[j].block<2, 2>(2, 0) = sigma[j];
    }
    d.beta.setZero();
    d.beta.diagonal() << 1, 1, -1, -1;
    return d;
  }();
  return a;
}

// d0(xi) = sum_j alpha_j xi_j + beta; Hermitian with eigenvalues
// +-sqrt(xi^2+1), each twice.
inline Mat4 symbol_d0(const Vec3& xi) {
  const auto& d = dirac_matrices();
  Mat4 m = d.beta;
  for (int j = 0; j < 3; ++j) m += xi[j] * d.alpha[j];
  return m;
}

// Spectral projector of d0(xi) onto the +-sqrt(xi^2+1) eigenspace:
// Pi_s(xi) = (I -+ ... ) = (I + s d0(xi)/<xi>)/2, rank 2, Hermitian.
inline Mat4 projector(const Vec3& xi, int sign) {
  const double bracket = std::sqrt(xi.squaredNorm() + 1.0);
  Mat4 m = Mat4::Identity();
  m += (static_cast<double>(sign) / bracket) * symbol_d0(xi);
  return 0.5 * m;
}

// Momentum-space rotation G(xi) = exp(beta (alpha.xi) theta(|xi|)) with
// theta(t) = arctan(t)/(2t), theta(0) = 1/2.  Since
// (beta (alpha.xi))^2 = -|xi|^2 I, the exponential reduces to
// cos(|xi| theta) I + sin(|xi| theta)/|xi| * beta (alpha.xi),
// and G d0 G^{-1} = sqrt(xi^2+1) beta.
inline Mat4 fw_transform(const Vec3& xi) {
  const auto& d = dirac_matrices();
  const double t = xi.norm();
  const double theta = (t < 1e-8) ? 0.5 : std::atan(t) / (2.0 * t);
  Mat4 a = Mat4::Zero();
  for (int j = 0; j < 3; ++j) a += xi[j] * d.alpha[j];
  const Mat4 ba = d.beta * a;
  const double phase = t * theta;
  const double sinc = (t < 1e-8) ? theta : std::sin(phase) / t;
  return std::cos(phase) * Mat4::Identity() + sinc * ba;
}

}  // namespace diracres
