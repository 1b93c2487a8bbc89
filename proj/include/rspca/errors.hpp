#pragma once

#include <stdexcept>
#include <string>

namespace rspca {

// Bad user input (shapes, ranges, unreadable files). CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-finite values, non-convergent quadrature). Exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rspca
