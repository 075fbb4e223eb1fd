#include "pinchlab/odecmp.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace pinchlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid weights over the sample range [first, last].
double trapezoid(const Eigen::VectorXd& f, int first, int last, double h) {
  if (last <= first) return 0.0;
  double sum = 0.5 * (f[first] + f[last]);
  for (int j = first + 1; j < last; ++j) sum += f[j];
  return sum * h;
}

// Centered differences inside, third-order one-sided stencils at the ends:
// the endpoint error must sit an order below the O(h^2) residuals that the
// comparison bounds certify, or exact solutions would fail their own bound.
Eigen::VectorXd finite_difference_derivative(const Eigen::VectorXd& v, double h) {
  const int n = static_cast<int>(v.size());
  Eigen::VectorXd d(n);
  d[0] = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h);
  for (int j = 1; j < n - 1; ++j) d[j] = (v[j + 1] - v[j - 1]) / (2.0 * h);
  d[n - 1] = (11.0 * v[n - 1] - 18.0 * v[n - 2] + 9.0 * v[n - 3] - 2.0 * v[n - 4]) / (6.0 * h);
  return d;
}

}  // namespace

Profile1D make_profile(const Eigen::VectorXd& values, double h) {
  if (values.size() < 11) {
    throw ValidationError("profile needs at least 11 samples, got " +
                          std::to_string(values.size()));
  }
  if (!(h > 0.0)) throw ValidationError("profile step must be positive");
  Profile1D p{values, h};
  if (p.length() > kPi + 0.2) {
    throw ValidationError("profile length " + std::to_string(p.length()) +
                          " exceeds pi + 0.2");
  }
  return p;
}

Profile1D read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::vector<double> ts, vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tcell, vcell;
    if (!std::getline(ss, tcell, ',') || !std::getline(ss, vcell)) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected 't,v'");
    }
    try {
      size_t p1 = 0, p2 = 0;
      double t = std::stod(tcell, &p1);
      double v = std::stod(vcell, &p2);
      ts.push_back(t);
      vs.push_back(v);
    } catch (const std::exception&) {
      if (lineno == 1 && ts.empty()) continue;  // header row
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected numeric 't,v'");
    }
  }
  if (ts.size() < 11) {
    throw ValidationError(path + ": profile needs at least 11 samples, got " +
                          std::to_string(ts.size()));
  }
  double h = ts[1] - ts[0];
  if (!(h > 0.0)) throw ValidationError(path + ": sample times must increase");
  if (std::abs(ts[0]) > 1e-9 * std::max(1.0, std::abs(h))) {
    throw ValidationError(path + ": profile must start at t = 0");
  }
  for (size_t j = 1; j < ts.size(); ++j) {
    double expect = static_cast<double>(j) * h;
    if (std::abs(ts[j] - expect) > 1e-6 * std::max(1.0, expect)) {
      throw ValidationError(path + ":" + std::to_string(j + 1) +
                            ": samples are not uniformly spaced");
    }
  }
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  return make_profile(v, h);
}

void write_profile_csv(const Profile1D& p, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path tmp = fs::path(path);
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    char buf[80];
    for (int j = 0; j < p.values.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                    p.h * static_cast<double>(j), p.values[j]);
      out << buf;
    }
  }
  fs::rename(tmp, fs::path(path));
}

ForcingResult harmonic_forcing(const Profile1D& p) {
  const int n = static_cast<int>(p.values.size());
  ForcingResult r;
  r.forcing.resize(n - 2);
  for (int j = 1; j < n - 1; ++j) {
    double second = (p.values[j - 1] - 2.0 * p.values[j] + p.values[j + 1]) / (p.h * p.h);
    r.forcing[j - 1] = second + p.values[j];
  }
  Eigen::VectorXd sq = r.forcing.cwiseProduct(r.forcing);
  r.epsilon = std::sqrt(trapezoid(sq, 0, static_cast<int>(sq.size()) - 1, p.h));
  return r;
}

double derivative_at_zero(const Profile1D& p) {
  return (-3.0 * p.values[0] + 4.0 * p.values[1] - p.values[2]) / (2.0 * p.h);
}

namespace {

CompareResult compare_against(const Profile1D& p, double ca, double cb, double eta,
                              double bound_factor) {
  const int n = static_cast<int>(p.values.size());
  CompareResult r;
  r.eta = eta;
  r.epsilon = harmonic_forcing(p).epsilon;
  Eigen::VectorXd vd = finite_difference_derivative(p.values, p.h);
  for (int j = 0; j < n; ++j) {
    double t = p.h * static_cast<double>(j);
    double u = ca * std::cos(t) + cb * std::sin(t);
    double ud = -ca * std::sin(t) + cb * std::cos(t);
    r.sup_value = std::max(r.sup_value, std::abs(p.values[j] - u));
    r.sup_derivative = std::max(r.sup_derivative, std::abs(vd[j] - ud));
  }
  r.bound = bound_factor * (r.epsilon + r.eta);
  r.bound_ok = r.sup_value <= r.bound && r.sup_derivative <= r.bound;
  return r;
}

}  // namespace

CompareResult compare_cauchy(const Profile1D& p, double a, double b) {
  double eta = std::max(std::abs(p.values[0] - a), std::abs(derivative_at_zero(p) - b));
  return compare_against(p, a, b, eta, kComparisonConstant);
}

CompareResult compare_boundary(const Profile1D& p, double a, double b) {
  const double l = p.length();
  if (l >= kPi || std::sin(l) < kConjugateGuard) {
    throw NearConjugate("interval length " + std::to_string(l) +
                        " is too close to a conjugate point (sin l = " +
                        std::to_string(std::sin(l)) + ")");
  }
  double eta = std::max(std::abs(p.values[0] - a),
                        std::abs(p.values[p.values.size() - 1] - b));
  double cb = (b - a * std::cos(l)) / std::sin(l);
  return compare_against(p, a, cb, eta, kComparisonConstant / std::sin(l));
}

Profile1D duhamel_solve(double a, double b, const Eigen::VectorXd& forcing, double h) {
  const int n = static_cast<int>(forcing.size());
  if (n < 11) throw ValidationError("forcing grid needs at least 11 samples");
  // Split sin(t - s) = sin t cos s - cos t sin s and accumulate both factors.
  Eigen::VectorXd v(n);
  double acc_cos = 0.0, acc_sin = 0.0;  // cumulative trapezoids
  double prev_cos = forcing[0] * std::cos(0.0);
  double prev_sin = forcing[0] * std::sin(0.0);
  v[0] = a;
  for (int j = 1; j < n; ++j) {
    double t = h * static_cast<double>(j);
    double cur_cos = forcing[j] * std::cos(t);
    double cur_sin = forcing[j] * std::sin(t);
    acc_cos += 0.5 * h * (prev_cos + cur_cos);
    acc_sin += 0.5 * h * (prev_sin + cur_sin);
    prev_cos = cur_cos;
    prev_sin = cur_sin;
    v[j] = a * std::cos(t) + b * std::sin(t) + std::sin(t) * acc_cos - std::cos(t) * acc_sin;
  }
  return make_profile(v, h);
}

}  // namespace pinchlab
