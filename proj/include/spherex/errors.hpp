#ifndef SPHEREX_ERRORS_HPP
#define SPHEREX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spherex {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDomain : public Error {
 public:
  using Error::Error;
};

/// Field, dual vector or basis whose length does not match the space.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A linear solve whose residual exceeds the acceptance threshold.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// An iterative solve that neither converged nor diverged within budget.
class InconclusiveSolve : public Error {
 public:
  using Error::Error;
};

/// The requested radius cannot be bracketed: c(lambda_min) < r.
class RadiusTooLarge : public Error {
 public:
  RadiusTooLarge(double radius, double c_at_floor)
      : Error("radius " + std::to_string(radius) +
              " is too large: constraint value at the multiplier floor is " +
              std::to_string(c_at_floor)),
        radius_(radius),
        c_at_floor_(c_at_floor) {}

  double radius() const noexcept { return radius_; }
  double c_at_floor() const noexcept { return c_at_floor_; }

 private:
  double radius_;
  double c_at_floor_;
};

}  // namespace spherex

#endif  // SPHEREX_ERRORS_HPP
