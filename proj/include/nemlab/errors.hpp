#pragma once

#include <stdexcept>
#include <string>

namespace nemlab {

// Raised when every state of a q-distribution is cut off, or a weight sits on
// the q > 1 pole of the q-exponential.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Quadrature or solver failure that no refinement within the caps can fix.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nemlab
