#pragma once

// Two-sheeted square root kappa(lambda) = sqrt(lambda^2 - 1) and the
// branch-tracking energy parameter.  The Physical sheet carries
// Im kappa >= 0 (decaying resolvent kernels); the Second sheet is the
// continuation across (-inf,-1] u [1,inf) with Im kappa <= 0.

#include <cmath>
#include <complex>

#include "diracres/common.hpp"

namespace diracres {

enum class Sheet { Physical, Second };

inline const char* to_string(Sheet s) {
  return s == Sheet::Physical ? "Physical" : "Second";
}

struct SpectralParameter {
  Complex lambda;
  Sheet sheet;
  Complex kappa;  // cached, consistent with sheet
};

// Physical-sheet branch: kappa = i * psqrt(1 - lambda^2) with the
// principal square root.  The argument is formed as -(lambda^2 - 1) so
// that IEEE signed zeros give the lambda + i0 boundary values on both
// cuts: real lambda > 1 yields kappa = +sqrt(lambda^2-1), real
// lambda < -1 yields kappa = -sqrt(lambda^2-1).
inline Complex kappa_on_sheet(Complex lambda, Sheet sheet) {
  const Complex k = iu * std::sqrt(-(lambda * lambda - 1.0));
  return sheet == Sheet::Physical ? k : -k;
}

inline SpectralParameter sheeted(Complex lambda, Sheet sheet) {
  if (std::abs(lambda - 1.0) < 1e-13 || std::abs(lambda + 1.0) < 1e-13)
    throw BranchPoint("sheeted: lambda at a branch point +-1");
  return SpectralParameter{lambda, sheet, kappa_on_sheet(lambda, sheet)};
}

}  // namespace diracres
