#pragma once

#include <stdexcept>
#include <string>

namespace mems {

/// A numerical solve (Newton, continuation, root bracketing) did not succeed.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rigorous bound could not be established.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mems
