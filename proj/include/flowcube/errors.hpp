#pragma once

#include <stdexcept>
#include <string>

namespace flowcube {

  // Malformed or inconsistent input (exit code 2 in the CLI).
  struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  // A materialization or search budget was exhausted (exit code 3).
  struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

}  // namespace flowcube
