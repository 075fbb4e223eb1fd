#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "pinchlab/errors.hpp"
#include "pinchlab/metric.hpp"
#include "pinchlab/pinching.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/surface.hpp"

using namespace pinchlab;

namespace {

constexpr double kPi = std::numbers::pi;

struct RescaledSpheroid {
  TriSurface surf;
  MetricGraph graph;
  Spectrum spec;
};

RescaledSpheroid rescaled_spheroid(double ratio, int subdivisions) {
  RescaledSpheroid r;
  r.surf = rescale_min_curvature_to_one(spheroid(ratio, subdivisions)).surface;
  r.graph = build_metric_graph(r.surf);
  r.spec = solve_smallest(r.surf);
  normalize_mean_square(r.spec, lumped_mass(r.surf));
  return r;
}

}  // namespace

TEST_SUITE("pinching") {

TEST_CASE("round-sphere frame is near-antipodal and near-orthogonal") {
  const auto& fx = fixtures::sphere4();
  AntipodalFrame frame = extract_frame(fx.spec, fx.graph, 3);
  REQUIRE(frame.pairs.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(frame.dist_xy(i, i) >= kPi - 0.15);
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(std::abs(frame.dist_xx(i, j) - kPi / 2) <= 0.15);
      CHECK(std::abs(frame.dist_xy(i, j) - kPi / 2) <= 0.15);
      CHECK(std::abs(frame.dist_yy(i, j) - kPi / 2) <= 0.15);
    }
  }
  CHECK(pk_deficiency(frame) <= 0.15);

  AntipodalFrame one = extract_frame(fx.spec, fx.graph, 1);
  CHECK(one.pairs.size() == 1);
  CHECK(one.pair_distances()[0] >= kPi - 0.15);
  // k=1 has no cross term: the deficiency is exactly the antipode gap.
  CHECK(pk_deficiency(one) == kPi - one.pair_distances()[0]);
}

TEST_CASE("squashing the sphere pulls the extremal pair together") {
  const auto& fx = fixtures::sphere3();
  AntipodalFrame round = extract_frame(fx.spec, fx.graph, 1);
  RescaledSpheroid prolate = rescaled_spheroid(1.3, 3);
  AntipodalFrame squeezed = extract_frame(prolate.spec, prolate.graph, 1);
  CHECK(squeezed.pair_distances()[0] < round.pair_distances()[0]);
}

TEST_CASE("deficiency of degenerate and permuted frames") {
  AntipodalFrame frame;
  frame.k = 2;
  frame.pairs = {{0, 1}, {0, 2}};  // x_1 = x_2
  frame.dist_xx = Eigen::MatrixXd::Zero(2, 2);
  frame.dist_xy.resize(2, 2);
  frame.dist_xy << kPi, kPi / 2, kPi / 2, kPi;
  frame.dist_yy.resize(2, 2);
  frame.dist_yy << 0, kPi / 2, kPi / 2, 0;
  CHECK(pk_deficiency(frame) >= kPi / 2);

  // Permutation and argmax/argmin swap invariance, exactly.
  const auto& fx = fixtures::sphere3();
  AntipodalFrame base = extract_frame(fx.spec, fx.graph, 3);
  double eta = pk_deficiency(base);

  AntipodalFrame permuted;
  permuted.k = 3;
  std::vector<int> order = {2, 0, 1};
  permuted.pairs.resize(3);
  permuted.dist_xx.resize(3, 3);
  permuted.dist_xy.resize(3, 3);
  permuted.dist_yy.resize(3, 3);
  for (int i = 0; i < 3; ++i) {
    permuted.pairs[static_cast<size_t>(i)] = base.pairs[static_cast<size_t>(order[static_cast<size_t>(i)])];
    for (int j = 0; j < 3; ++j) {
      permuted.dist_xx(i, j) = base.dist_xx(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      permuted.dist_xy(i, j) = base.dist_xy(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
      permuted.dist_yy(i, j) = base.dist_yy(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }
  }
  CHECK(pk_deficiency(permuted) == eta);

  // Swap roles of (x_2, y_2); rebuild every cached distance from base.
  AntipodalFrame swapped = base;
  std::swap(swapped.pairs[1][0], swapped.pairs[1][1]);
  for (int j = 0; j < 3; ++j) {
    if (j == 1) continue;
    swapped.dist_xx(1, j) = base.dist_xy(j, 1);  // d(y_2, x_j)
    swapped.dist_xx(j, 1) = base.dist_xy(j, 1);
    swapped.dist_yy(1, j) = base.dist_xy(1, j);  // d(x_2, y_j)
    swapped.dist_yy(j, 1) = base.dist_xy(1, j);
    swapped.dist_xy(1, j) = base.dist_yy(1, j);  // d(y_2, y_j)
    swapped.dist_xy(j, 1) = base.dist_xx(j, 1);  // d(x_j, x_2)
  }
  CHECK(pk_deficiency(swapped) == eta);
}

TEST_CASE("cos-distance projection on the round sphere") {
  const auto& fx = fixtures::sphere4();
  ProjectionReport rep = project_cos_distance(fx.spec, fx.surf, fx.graph, 17, 3);
  CHECK(rep.base == 17);
  CHECK(rep.residual_sup <= 0.1);
  CHECK(rep.residual_l2 <= rep.residual_sup);
  CHECK(rep.coeff_norm_defect <= 0.05);

  // Aligned coefficients recover the base point's unit position.
  Eigen::MatrixXd F = fx.spec.functions.middleCols(1, 3);
  Eigen::MatrixXd R = oracle::procrustes(F, fx.surf.V);
  Eigen::VectorXd aligned = R.transpose() * rep.coefficients;
  Eigen::VectorXd p = fx.surf.V.row(17).normalized().transpose();
  CHECK((aligned - p).norm() <= 0.1);

  // Empty projection leaves the full cosine as residual.
  ProjectionReport empty = project_cos_distance(fx.spec, fx.surf, fx.graph, 17, 0);
  CHECK(empty.coefficients.size() == 0);
  CHECK(empty.residual_sup >= 0.9);
  CHECK(empty.residual_sup <= 1.0 + 1e-9);
}

TEST_CASE("gradient envelope ratio") {
  const auto& fx = fixtures::sphere4();
  // Analytic profile: eigenfunction replaced by the ambient coordinate.
  Spectrum analytic;
  analytic.eigenvalues.resize(2);
  analytic.eigenvalues << 0.0, 2.0;
  analytic.functions.resize(fx.surf.vertex_count(), 2);
  analytic.functions.col(0).setOnes();
  analytic.functions.col(1) = fx.surf.V.col(2);
  analytic.volume = total_area(fx.surf);
  CHECK(li_yau_check(analytic, fx.surf, 1) <= 1.1);

  for (int i = 1; i <= 3; ++i) {
    CHECK(li_yau_check(fx.spec, fx.surf, i) <= 1.1);
  }

  RescaledSpheroid prolate = rescaled_spheroid(1.2, 3);
  CHECK(li_yau_check(prolate.spec, prolate.surf, 1) <= 1.2);
}

TEST_CASE("radial kernel means against closed forms") {
  const auto& fx = fixtures::sphere4();
  Eigen::VectorXd dist = geodesic_distances(fx.graph, 0).d;
  CHECK(coarea_comparison(fx.surf, dist, RadialKernel::Cos) <= 0.03);
  CHECK(coarea_comparison(fx.surf, dist, RadialKernel::CosSquared) <= 0.03);
  CHECK(coarea_comparison(fx.surf, dist, RadialKernel::SinSquared) <= 0.06);

  // Squashed sphere drifts from the round means. The raw prolate keeps every
  // distance at least as long as the round sphere's, so the antipode guard
  // stays clear; the curvature-rescaled copy shrinks below it.
  const auto& fx3 = fixtures::sphere3();
  Eigen::VectorXd d3 = geodesic_distances(fx3.graph, 0).d;
  double round_defect = coarea_comparison(fx3.surf, d3, RadialKernel::CosSquared);
  TriSurface prolate = spheroid(1.3, 3);
  MetricGraph pg = build_metric_graph(prolate);
  Eigen::VectorXd dp = geodesic_distances(pg, 0).d;
  double prolate_defect = coarea_comparison(prolate, dp, RadialKernel::CosSquared);
  CHECK(prolate_defect > round_defect);

  // A surface with everything inside radius pi - 0.3 has no antipode.
  RescaledSpheroid flat = rescaled_spheroid(0.2, 2);
  Eigen::VectorXd df = geodesic_distances(flat.graph, 0).d;
  CHECK_THROWS_AS(coarea_comparison(flat.surf, df, RadialKernel::Cos), NoAntipode);
}

TEST_CASE("eikonal defect on the round sphere") {
  const auto& fx = fixtures::sphere4();
  CHECK(eikonal_defect(fx.spec, fx.surf, 1) <= 0.05);
}

TEST_CASE("residual integral of an exact solution") {
  int n = 315;  // h = 0.01 on [0, pi]
  double h = kPi / static_cast<double>(n - 1);
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = std::cos(h * static_cast<double>(j));
  CHECK(residual_integral(v, h) <= 1e-4);
}

TEST_CASE("geodesic residuals separate eigenfunction modes") {
  const auto& fx = fixtures::sphere4();
  Eigen::Index a_idx = 0;
  fx.spec.functions.col(1).maxCoeff(&a_idx);
  int a = static_cast<int>(a_idx);
  Eigen::VectorXd dist = geodesic_distances(fx.graph, a).d;
  int b = -1;
  for (Eigen::Index v = 0; v < dist.size(); ++v) {
    if (dist[v] >= kPi / 3 && dist[v] <= 2 * kPi / 3) {
      if (b < 0 || std::abs(dist[v] - kPi / 2) < std::abs(dist[b] - kPi / 2)) {
        b = static_cast<int>(v);
      }
    }
  }
  REQUIRE(b >= 0);
  double pure = geodesic_residual(fx.spec, 1, fx.surf, fx.graph, a, b);
  CHECK(pure <= 0.5);
  Eigen::VectorXd mixed = fx.spec.functions.col(1) + 0.5 * fx.spec.functions.col(4);
  CHECK(geodesic_residual(mixed, fx.surf, fx.graph, a, b) > pure);

  CHECK_THROWS_AS(geodesic_residual(fx.spec, 1, fx.surf, fx.graph, a, a), ValidationError);
  int neighbor = fx.graph.targets[static_cast<size_t>(fx.graph.offsets[a])];
  CHECK_THROWS_AS(geodesic_residual(fx.spec, 1, fx.surf, fx.graph, a, neighbor),
                  ValidationError);
}

TEST_CASE("residual distribution statistics") {
  const auto& fx = fixtures::sphere4();
  ResidualSummary low = residual_distribution(fx.spec, 1, fx.surf, fx.graph, 100, 42);
  // Paths askew to the mesh symmetry axes pick up slope kinks that the
  // second-difference stencil integrates; 0.67 measured, margin for the rest.
  CHECK(low.median <= 1.0);
  CHECK(low.p90 >= low.median);
  ResidualSummary high = residual_distribution(fx.spec, 4, fx.surf, fx.graph, 100, 42);
  CHECK(high.median >= 5.0 * low.median);

  ResidualSummary once = residual_distribution(fx.spec, 1, fx.surf, fx.graph, 10, 7);
  ResidualSummary twice = residual_distribution(fx.spec, 1, fx.surf, fx.graph, 10, 7);
  CHECK((once.residuals - twice.residuals).cwiseAbs().maxCoeff() == 0.0);
  CHECK(once.median == twice.median);
  CHECK(once.p90 == twice.p90);

  CHECK_THROWS_AS(residual_distribution(fx.spec, 1, fx.surf, fx.graph, 5, 42),
                  ValidationError);
}

TEST_CASE("small sweep ties the diameter gap to the spectral gap") {
  // If the diameter is within 0.02 of pi, the first eigenvalue sits within
  // 0.3 of 2 (checked on a small spheroid family).
  for (double ratio : {0.95, 1.0, 1.05}) {
    RescaledSpheroid point = rescaled_spheroid(ratio, 2);
    double diameter = eccentricities(point.graph).diameter;
    if (kPi - diameter <= 0.02) {
      CHECK(point.spec.eigenvalues[1] - 2.0 <= 0.3);
    }
  }
}

}  // TEST_SUITE
