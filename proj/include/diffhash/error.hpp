#pragma once

#include <stdexcept>
#include <string>

namespace diffhash {

/// Invalid caller input: malformed files, bad dimensions, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace diffhash
