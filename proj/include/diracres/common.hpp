#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace diracres {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4cd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;
inline const Complex iu{0.0, 1.0};

// Error taxonomy.  Configuration problems map to CLI exit code 1,
// numerical non-convergence to 2, failed tolerance checks to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};
struct ValidationError : ConfigError {
  using ConfigError::ConfigError;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BranchPoint : NumericalError {
  using NumericalError::NumericalError;
};
struct CoincidentPoints : NumericalError {
  using NumericalError::NumericalError;
};
struct InvalidResolution : NumericalError {
  using NumericalError::NumericalError;
};
struct NonPositiveRadius : NumericalError {
  using NumericalError::NumericalError;
};
struct AllocationFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct BoundaryZero : NumericalError {
  using NumericalError::NumericalError;
};
struct PhaseUnresolved : NumericalError {
  using NumericalError::NumericalError;
};
struct StiffIntegration : NumericalError {
  using NumericalError::NumericalError;
};
struct UnsupportedChannel : NumericalError {
  using NumericalError::NumericalError;
};
struct BasePointZero : NumericalError {
  using NumericalError::NumericalError;
};
struct NearResonanceIllConditioned : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace diracres
