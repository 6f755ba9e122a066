#pragma once

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace overdet {

// Working precision for all field calculus. Fourth and sixth derivatives of
// spectral interpolants amplify rounding by roughly N^(2k); quad precision keeps
// that amplification far below the identity tolerances.
using Real = boost::multiprecision::float128;

inline const Real kPi = boost::multiprecision::float128(
    "3.14159265358979323846264338327950288");

inline double to_double(const Real& x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }

template <class T>
T pi_as() {
  if constexpr (std::is_same_v<T, Real>) {
    return kPi;
  } else {
    return std::numbers::pi_v<T>;
  }
}

/// Error categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorCode {
  NonStarShaped,
  EmptyShape,
  NotInterior,
  OrderTooHigh,
  GridMismatch,
  InvalidP,
  InvalidGrid,
  NonFiniteField,
  SingularSystem,
  Unconverged,
  MaxOnBoundary,
  DegenerateDenominator,
  CertificateViolated,
  InequalityViolated,
  NoiseFloor,
  BadDimension,
  InadmissibleShape,
  UsageError,
  CheckFailed,
  IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double a) const { return {a * x, a * y}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

}  // namespace overdet
