#pragma once

#include <stdexcept>
#include <string>

namespace pinchlab {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError  -> 2 (rejected input)
//   NumericGuard     -> 3 (a numeric precondition failed on valid input)
//   SolverError      -> 4 (iterative solver did not converge)
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericGuard : std::runtime_error {
  explicit NumericGuard(const std::string& msg) : std::runtime_error(msg) {}
};

// Minimum curvature is not positive, so the surface cannot be rescaled to
// meet the curvature floor the diagnostics assume.
struct HypothesisViolation : NumericGuard {
  explicit HypothesisViolation(const std::string& msg) : NumericGuard(msg) {}
};

// No vertex is close enough to antipodal from the base point.
struct NoAntipode : NumericGuard {
  explicit NoAntipode(const std::string& msg) : NumericGuard(msg) {}
};

// Boundary comparison requested on an interval where sin(l) is too small.
struct NearConjugate : NumericGuard {
  explicit NearConjugate(const std::string& msg) : NumericGuard(msg) {}
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pinchlab
