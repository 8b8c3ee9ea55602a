#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace horizon {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct Momentum {
  double kx = 0.0;
  double ky = 0.0;
};

// Uniform tilt, or a local sample of a tilt field.
struct Tilt {
  double vx = 0.0;
  double vy = 0.0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on an input value.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid value of a named configuration field.
class FieldError : public DomainError {
 public:
  FieldError(std::string field, const std::string& what) : DomainError(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Residual, stability or conservation check failed during a computation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

Mat2 pauli(int j);  // 0 -> identity, 1..3 -> sigma_x, sigma_y, sigma_z

}  // namespace horizon
