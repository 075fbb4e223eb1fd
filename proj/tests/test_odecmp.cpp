#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/odecmp.hpp"
#include "pinchlab/rng.hpp"

using namespace pinchlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Samples f at t_j = j h for j = 0..n-1.
template <typename F>
Eigen::VectorXd sampled(F f, int n, double h) {
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = f(h * static_cast<double>(j));
  return v;
}

std::filesystem::path temp_csv(const std::string& stem) {
  return std::filesystem::temp_directory_path() / (stem + ".csv");
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  for (const auto& line : lines) out << line << "\n";
}

}  // namespace

TEST_SUITE("odecmp") {

TEST_CASE("profile construction enforces its contract") {
  Eigen::VectorXd ok = sampled([](double t) { return std::cos(t); }, 50, 0.05);
  Profile1D p = make_profile(ok, 0.05);
  CHECK(p.length() == doctest::Approx(49 * 0.05));

  Eigen::VectorXd short_v = ok.head(10);
  CHECK_THROWS_AS(make_profile(short_v, 0.05), ValidationError);
  CHECK_THROWS_AS(make_profile(ok, 0.0), ValidationError);
  CHECK_THROWS_AS(make_profile(ok, -0.01), ValidationError);
  // 100 samples at h = 0.04 run out to l = 3.96 > pi + 0.2.
  Eigen::VectorXd long_v = sampled([](double t) { return std::cos(t); }, 100, 0.04);
  CHECK_THROWS_AS(make_profile(long_v, 0.04), ValidationError);
}

TEST_CASE("csv round trip is bitwise") {
  Eigen::VectorXd v = sampled([](double t) { return std::cos(t) + 0.25 * t; }, 53, 0.05);
  Profile1D p = make_profile(v, 0.05);
  auto path = temp_csv("odecmp_roundtrip");
  write_profile_csv(p, path.string());
  Profile1D q = read_profile_csv(path.string());
  REQUIRE(q.values.size() == p.values.size());
  CHECK(q.h == p.h);
  for (int j = 0; j < p.values.size(); ++j) CHECK(q.values[j] == p.values[j]);
  std::filesystem::remove(path);
}

TEST_CASE("csv reader accepts an optional header") {
  auto path = temp_csv("odecmp_header");
  std::vector<std::string> lines{"t,v"};
  for (int j = 0; j < 20; ++j) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", 0.1 * j, std::sin(0.1 * j));
    lines.emplace_back(buf);
  }
  write_lines(path, lines);
  Profile1D p = read_profile_csv(path.string());
  CHECK(p.values.size() == 20);
  CHECK(p.h == doctest::Approx(0.1).epsilon(1e-12));
  std::filesystem::remove(path);
}

TEST_CASE("csv reader reports the offending line") {
  auto path = temp_csv("odecmp_nonuniform");
  std::vector<std::string> lines;
  for (int j = 0; j < 15; ++j) {
    double t = 0.1 * j + (j == 3 ? 0.05 : 0.0);  // line 4 breaks the spacing
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", t, std::cos(t));
    lines.emplace_back(buf);
  }
  write_lines(path, lines);
  try {
    read_profile_csv(path.string());
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":4") != std::string::npos);
    CHECK(msg.find("not uniformly spaced") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects garbage cells") {
  auto path = temp_csv("odecmp_garbage");
  std::vector<std::string> lines;
  for (int j = 0; j < 15; ++j) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", 0.1 * j, std::cos(0.1 * j));
    lines.emplace_back(buf);
  }
  lines[2] = "twelve,o'clock";  // line 3: not a header position, must fail
  write_lines(path, lines);
  try {
    read_profile_csv(path.string());
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":3") != std::string::npos);
    CHECK(msg.find("numeric") != std::string::npos);
  }

  lines[2] = "0.2";  // single cell
  write_lines(path, lines);
  CHECK_THROWS_AS(read_profile_csv(path.string()), ValidationError);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_profile_csv("/nonexistent/odecmp.csv"), ValidationError);
}

TEST_CASE("csv reader requires a profile starting at zero") {
  auto path = temp_csv("odecmp_offset");
  std::vector<std::string> lines;
  for (int j = 0; j < 15; ++j) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g", 0.1 + 0.1 * j, std::cos(0.1 * j));
    lines.emplace_back(buf);
  }
  write_lines(path, lines);
  CHECK_THROWS_AS(read_profile_csv(path.string()), ValidationError);
  std::filesystem::remove(path);
}

TEST_CASE("harmonic forcing of exact and perturbed cosines") {
  // cos solves v'' + v = 0; the residual is pure discretization noise.
  const int n = 315;
  const double h = kPi / static_cast<double>(n - 1);
  Profile1D cosp = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
  CHECK(harmonic_forcing(cosp).epsilon <= 1e-3);

  // v = cos t + 0.01 sin 3t has Z = -0.08 sin 3t, so
  // eps = 0.08 sqrt(pi/2) = 0.10026513098524002.
  const int m = 1001;
  const double hm = kPi / static_cast<double>(m - 1);
  Profile1D pert = make_profile(
      sampled([](double t) { return std::cos(t) + 0.01 * std::sin(3.0 * t); }, m, hm), hm);
  double eps = harmonic_forcing(pert).epsilon;
  CHECK(eps == doctest::Approx(0.10026513098524002).epsilon(0.05));
}

TEST_CASE("harmonic forcing of a linear ramp") {
  // v = t gives Z = t, so eps ~ sqrt(l^3 / 3).
  const int n = 1001;
  const double h = 0.001;
  Profile1D ramp = make_profile(sampled([](double t) { return t; }, n, h), h);
  double l = ramp.length();
  CHECK(harmonic_forcing(ramp).epsilon ==
        doctest::Approx(std::sqrt(l * l * l / 3.0)).epsilon(0.02));
}

TEST_CASE("one-sided derivative at zero") {
  const int n = 200;
  const double h = 0.01;
  Profile1D cosp = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
  CHECK(std::abs(derivative_at_zero(cosp)) <= 1e-3);
  Profile1D sinp = make_profile(sampled([](double t) { return std::sin(t); }, n, h), h);
  CHECK(derivative_at_zero(sinp) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("cauchy comparison against matching and perturbed data") {
  const int n = 315;
  const double h = kPi / static_cast<double>(n - 1);
  Profile1D cosp = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);

  CompareResult exact = compare_cauchy(cosp, 1.0, 0.0);
  CHECK(exact.sup_value <= 1e-3);
  CHECK(exact.sup_derivative <= 1e-3);
  CHECK(exact.bound_ok);

  // v = cos t + 0.01 sin 3t against u = cos t: the defect is 0.01 sin 3t.
  Profile1D pert = make_profile(
      sampled([](double t) { return std::cos(t) + 0.01 * std::sin(3.0 * t); }, n, h), h);
  CompareResult r = compare_cauchy(pert, 1.0, 0.0);
  CHECK(r.sup_value == doctest::Approx(0.01).epsilon(0.10));
  CHECK(r.eta == doctest::Approx(0.03).epsilon(0.05));
  CHECK(std::abs(r.eta - 0.03) <= 1e-3);
  CHECK(r.bound_ok);

  // Deliberately wrong data: the mismatch at t = 0 dominates exactly.
  CompareResult wrong = compare_cauchy(cosp, 0.5, 0.0);
  CHECK(std::abs(wrong.sup_value - 0.5) <= 1e-12);
  CHECK(wrong.bound_ok);
}

TEST_CASE("boundary comparison on a quarter period") {
  const int n = 158;
  const double h = (kPi / 2.0) / static_cast<double>(n - 1);
  Profile1D cosp = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
  CompareResult exact = compare_boundary(cosp, 1.0, cosp.values[n - 1]);
  CHECK(exact.sup_value <= 1e-3);
  CHECK(exact.sup_derivative <= 1e-3);
  CHECK(exact.bound_ok);

  // The interpolating solution picks up an extra 0.01 sin t, so the defect
  // peaks at 0.01 max|sin 3t + sin t| = 0.08 / (3 sqrt 3).
  Profile1D pert = make_profile(
      sampled([](double t) { return std::cos(t) + 0.01 * std::sin(3.0 * t); }, n, h), h);
  CompareResult r = compare_boundary(pert, 1.0, pert.values[n - 1]);
  CHECK(r.eta == 0.0);
  CHECK(r.sup_value == doctest::Approx(0.015396007178390019).epsilon(0.10));
  CHECK(r.bound_ok);
}

TEST_CASE("boundary comparison refuses near-conjugate intervals") {
  // l = pi - 0.01 has sin l < 0.05.
  {
    const int n = 400;
    const double h = (kPi - 0.01) / static_cast<double>(n - 1);
    Profile1D p = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
    CHECK_THROWS_AS(compare_boundary(p, 1.0, p.values[n - 1]), NearConjugate);
  }
  // l = 3.2 is past the conjugate point outright.
  {
    const int n = 400;
    const double h = 3.2 / static_cast<double>(n - 1);
    Profile1D p = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
    CHECK_THROWS_AS(compare_boundary(p, 1.0, p.values[n - 1]), NearConjugate);
  }
  // NearConjugate participates in the numeric-guard family.
  const int n = 400;
  const double h = 3.2 / static_cast<double>(n - 1);
  Profile1D p = make_profile(sampled([](double t) { return std::cos(t); }, n, h), h);
  CHECK_THROWS_AS(compare_boundary(p, 1.0, 0.0), NumericGuard);
}

TEST_CASE("variation of constants with zero forcing is exact") {
  const int n = 300;
  const double h = 0.01;
  Profile1D v = duhamel_solve(0.7, -0.4, Eigen::VectorXd::Zero(n), h);
  for (int j = 0; j < n; ++j) {
    double t = h * static_cast<double>(j);
    CHECK(std::abs(v.values[j] - (0.7 * std::cos(t) - 0.4 * std::sin(t))) <= 1e-15);
  }
}

TEST_CASE("variation of constants reproduces a known forced solution") {
  // v'' + v = -0.08 sin 3t with v(0) = 1, v'(0) = 0.03 has the closed form
  // v = cos t + 0.01 sin 3t.
  const int n = 3141;
  const double h = 0.001;
  Eigen::VectorXd z = sampled([](double t) { return -0.08 * std::sin(3.0 * t); }, n, h);
  Profile1D v = duhamel_solve(1.0, 0.03, z, h);
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    double t = h * static_cast<double>(j);
    sup = std::max(sup, std::abs(v.values[j] - (std::cos(t) + 0.01 * std::sin(3.0 * t))));
  }
  CHECK(sup <= 1e-4);

  // Recovering the forcing closes the loop on epsilon.
  double eps = harmonic_forcing(v).epsilon;
  CHECK(eps == doctest::Approx(0.10026513098524002).epsilon(0.05));
}

TEST_CASE("seeded forcing family satisfies both comparison bounds") {
  auto eng = seeded_engine(2024);
  std::uniform_real_distribution<double> coeff(-0.1, 0.1);
  std::uniform_real_distribution<double> data(-1.0, 1.0);
  std::uniform_real_distribution<double> len(0.5, kPi - 0.05);

  int boundary_cases = 0;
  for (int trial = 0; trial < 50; ++trial) {
    double l = len(eng);
    double a = data(eng);
    double b = data(eng);
    double c[5], s[5];
    for (int m = 0; m < 5; ++m) {
      c[m] = coeff(eng);
      s[m] = coeff(eng);
    }
    const int n = 400;
    const double h = l / static_cast<double>(n - 1);
    Eigen::VectorXd z(n);
    for (int j = 0; j < n; ++j) {
      double t = h * static_cast<double>(j);
      double sum = 0.0;
      for (int m = 0; m < 5; ++m) {
        sum += c[m] * std::cos((m + 1) * t) + s[m] * std::sin((m + 1) * t);
      }
      z[j] = sum;
    }
    Profile1D v = duhamel_solve(a, b, z, h);

    CompareResult cauchy = compare_cauchy(v, a, b);
    CHECK(cauchy.bound_ok);

    if (std::sin(l) >= kConjugateGuard) {
      ++boundary_cases;
      CompareResult boundary = compare_boundary(v, a, v.values[n - 1]);
      CHECK(boundary.eta == 0.0);
      CHECK(boundary.bound_ok);
    } else {
      CHECK_THROWS_AS(compare_boundary(v, a, v.values[n - 1]), NearConjugate);
    }
  }
  CHECK(boundary_cases >= 45);
}

TEST_CASE("comparison defects scale linearly in forcing and data") {
  // v - u solves the same equation with doubled inputs, so both sups double.
  const double h = 1e-5;
  const int n = 200001;  // l = 2.0
  const double a0 = 0.3, b0 = -0.2, da = 0.05, db = -0.04;
  Eigen::VectorXd z1 = sampled([](double t) { return 0.02 * std::sin(2.0 * t); }, n, h);
  Profile1D v1 = duhamel_solve(a0 + da, b0 + db, z1, h);
  Profile1D v2 = duhamel_solve(a0 + 2.0 * da, b0 + 2.0 * db, 2.0 * z1, h);

  CompareResult r1 = compare_cauchy(v1, a0, b0);
  CompareResult r2 = compare_cauchy(v2, a0, b0);
  CHECK(r2.sup_value == doctest::Approx(2.0 * r1.sup_value).epsilon(1e-9));
  CHECK(r2.sup_derivative == doctest::Approx(2.0 * r1.sup_derivative).epsilon(1e-9));
  CHECK(r2.eta == doctest::Approx(2.0 * r1.eta).epsilon(1e-9));
  CHECK(r2.epsilon == doctest::Approx(2.0 * r1.epsilon).epsilon(1e-6));
}

}  // TEST_SUITE
