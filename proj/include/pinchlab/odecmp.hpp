#pragma once

#include <Eigen/Dense>

#include <string>

#include "pinchlab/errors.hpp"

namespace pinchlab {

// Uniformly sampled scalar profile v on [0, l], l = h * (samples - 1).
// Requires at least 11 samples and l <= pi + 0.2.
struct Profile1D {
  Eigen::VectorXd values;
  double h = 0.0;

  double length() const { return h * static_cast<double>(values.size() - 1); }
};

Profile1D make_profile(const Eigen::VectorXd& values, double h);
// Two-column CSV "t,v" with a fixed uniform step; header line optional.
Profile1D read_profile_csv(const std::string& path);
void write_profile_csv(const Profile1D& p, const std::string& path);

// Multiplicative constant of the comparison bounds below.
constexpr double kComparisonConstant = 4.0;
// Smallest sin(l) the boundary comparison accepts.
constexpr double kConjugateGuard = 0.05;

struct ForcingResult {
  Eigen::VectorXd forcing;  // Z_j = v'' + v at interior samples 1..N-2
  double epsilon = 0.0;     // sqrt of the trapezoid integral of Z^2 over the interior
};

// Recovers the forcing of v'' + v = Z by centered second differences.
ForcingResult harmonic_forcing(const Profile1D& p);

// Derivative at t = 0 from the 3-point one-sided stencil.
double derivative_at_zero(const Profile1D& p);

struct CompareResult {
  double sup_value = 0.0;       // sup |v - u|
  double sup_derivative = 0.0;  // sup |v' - u'|
  double epsilon = 0.0;         // forcing size of v
  double eta = 0.0;             // data mismatch at the prescribed conditions
  double bound = 0.0;           // C (eps + eta), or C/sin(l) (eps + eta)
  bool bound_ok = false;
};

// v against u(t) = a cos t + b sin t with Cauchy data u(0) = a, u'(0) = b.
CompareResult compare_cauchy(const Profile1D& p, double a, double b);

// v against the solution of u'' + u = 0 with u(0) = a, u(l) = b. Throws
// NearConjugate when l >= pi or sin(l) < kConjugateGuard.
CompareResult compare_boundary(const Profile1D& p, double a, double b);

// Exact-in-quadrature solution of v'' + v = Z with v(0) = a, v'(0) = b via the
// variation-of-constants integral, cumulative trapezoid on the given grid.
Profile1D duhamel_solve(double a, double b, const Eigen::VectorXd& forcing, double h);

}  // namespace pinchlab
