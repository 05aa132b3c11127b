#pragma once

#include <stdexcept>
#include <string>

namespace spotkit {

/// Raised for invalid inputs: malformed files, broken invariants, shape or
/// configuration mismatches. The CLI maps it to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spotkit
