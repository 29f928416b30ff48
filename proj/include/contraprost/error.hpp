#pragma once

#include <stdexcept>
#include <string>

namespace contraprost {

// Raised for invalid inputs: malformed files, violated preconditions,
// out-of-range values. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace contraprost
