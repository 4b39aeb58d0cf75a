#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lorentz {

/// Argument outside the domain of a function (branch cut, r = 0, bad interval).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Result not representable in double precision.
class OverflowError : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

/// F(k)^{-1} evaluated at a pole (hard-sphere model with I(k, alpha) = 0).
class PoleError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A linear solve hit an exactly singular matrix.
class SingularMatrixError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, std::size_t iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::size_t iterations_;
};

}  // namespace lorentz
