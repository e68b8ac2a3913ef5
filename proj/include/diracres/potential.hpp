#pragma once

// Compactly supported Hermitian 4x4 matrix potentials V(x) = g p(|x|) M
// with a C^infty radial bump profile, and the C^2 cutoff chi with
// chi V = V.

#include <cmath>
#include <functional>

#include "diracres/common.hpp"
#include "diracres/dirac_algebra.hpp"

namespace diracres {

// p(r) = exp(1 - 1/(1 - (r/R0)^2)) for r < R0, 0 otherwise.
// p(0) = 1; all derivatives vanish at r = R0.
struct BumpProfile {
  double R0;
  double operator()(double r) const {
    const double u = r / R0;
    if (u >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  }
};

inline BumpProfile make_bump_profile(double R0) {
  if (!(R0 > 0.0)) throw NonPositiveRadius("make_bump_profile: R0 <= 0");
  return BumpProfile{R0};
}

enum class PotentialChannel { ElectricI4, ScalarBeta, CustomHermitian };

inline const char* to_string(PotentialChannel c) {
  switch (c) {
    case PotentialChannel::ElectricI4: return "ElectricI4";
    case PotentialChannel::ScalarBeta: return "ScalarBeta";
    default: return "CustomHermitian";
  }
}

struct MatrixPotential {
  double R0 = 1.0;
  PotentialChannel channel = PotentialChannel::ElectricI4;
  double g = 2.0;
  Mat4 custom = Mat4::Identity();  // used only for CustomHermitian

  BumpProfile profile() const { return make_bump_profile(R0); }

  Mat4 matrix_factor() const {
    switch (channel) {
      case PotentialChannel::ElectricI4: return Mat4::Identity();
      case PotentialChannel::ScalarBeta: return dirac_matrices().beta;
      default: return custom;
    }
  }

  // Scalar radial factor g p(r); the full value is scalar * matrix_factor.
  double scalar(double r) const { return g * profile()(r); }
};

inline Mat4 sample_potential(const MatrixPotential& V, const Vec3& x) {
  return V.scalar(x.norm()) * V.matrix_factor();
}

// chi(r) = 1 for r <= R0, quintic smoothstep down to 0 at r >= R0 + margin.
// C^2 at both ends; chi V = V holds exactly.
struct CutoffProfile {
  double R0 = 1.0;
  double margin = 0.25;

  double operator()(double r) const {
    if (r <= R0) return 1.0;
    if (r >= R0 + margin) return 0.0;
    const double u = (r - R0) / margin;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  }
  double outer_radius() const { return R0 + margin; }
};

inline CutoffProfile make_cutoff(double R0, double margin_fraction = 0.25) {
  if (!(R0 > 0.0)) throw NonPositiveRadius("make_cutoff: R0 <= 0");
  return CutoffProfile{R0, margin_fraction * R0};
}

}  // namespace diracres
