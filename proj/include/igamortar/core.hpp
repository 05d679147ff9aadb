#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace igamortar {

using Vec2 = std::array<double, 2>;

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

/// 2x2 matrix, row-major. For geometric Jacobians column c holds dF/dzeta_c.
struct Mat2 {
  std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

  double& operator()(int i, int j) { return a[2 * i + j]; }
  double operator()(int i, int j) const { return a[2 * i + j]; }

  double det() const { return a[0] * a[3] - a[1] * a[2]; }

  Mat2 inverse() const {
    const double d = det();
    return Mat2{{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
  }

  Mat2 transpose() const { return Mat2{{a[0], a[2], a[1], a[3]}}; }

  Vec2 column(int j) const { return {a[j], a[2 + j]}; }

  Vec2 operator*(const Vec2& v) const {
    return {a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]};
  }

  static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }
};

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. t outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A structural precondition does not hold (continuity, degree, variant, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Degenerate geometric map.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class InversionError : public Error {
 public:
  InversionError(const std::string& what, double best_residual, Vec2 point)
      : Error(what), best_residual_(best_residual), point_(point) {}
  double best_residual() const { return best_residual_; }
  const Vec2& point() const { return point_; }

 private:
  double best_residual_;
  Vec2 point_;
};

class CoefficientError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, std::ptrdiff_t index)
      : Error(what), index_(index) {}
  /// Unknown (in the caller's numbering) at which elimination broke down.
  std::ptrdiff_t index() const { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// Raised by the saddle solver when the multiplier rows of one interface are
/// linearly dependent.
class SingularConstraintError : public SingularMatrixError {
 public:
  SingularConstraintError(const std::string& what, std::ptrdiff_t index, int interface_id)
      : SingularMatrixError(what, index), interface_(interface_id) {}
  int interface_id() const { return interface_; }

 private:
  int interface_;
};

/// Malformed input file or configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace igamortar
