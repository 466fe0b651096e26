#pragma once

#include <stdexcept>
#include <string>

namespace braindec {

// All recoverable failures (malformed files, violated preconditions,
// degenerate statistics) surface as this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace braindec
