#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polsdf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline constexpr double kPi = std::numbers::pi;

// Error taxonomy. The CLI maps these onto exit codes (data = 2, numerical = 3).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad magic, truncated payload, shape mismatch).
class DataError : public Error {
  public:
    using Error::Error;
};

// Non-finite values or a diverging optimization.
class NumericalError : public Error {
  public:
    using Error::Error;
};

// Folds an angle into [0, pi).
inline double fold_pi(double angle) {
    double r = std::fmod(angle, kPi);
    if (r < 0.0) r += kPi;
    // fmod can return exactly pi after the correction for tiny negative inputs
    if (r >= kPi) r = 0.0;
    return r;
}

}  // namespace polsdf
