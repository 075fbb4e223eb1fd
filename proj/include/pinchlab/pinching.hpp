#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "pinchlab/metric.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/surface.hpp"

namespace pinchlab {

// Extremal vertex pairs (argmax, argmin) of the first k nonconstant
// eigenfunctions, with all pairwise graph distances cached.
struct AntipodalFrame {
  int k = 0;
  std::vector<std::array<int, 2>> pairs;  // pairs[i] = {x_i, y_i}
  Eigen::MatrixXd dist_xx;                // d(x_i, x_j)
  Eigen::MatrixXd dist_xy;                // d(x_i, y_j); diagonal = d(x_i, y_i)
  Eigen::MatrixXd dist_yy;                // d(y_i, y_j)

  Eigen::VectorXd pair_distances() const { return dist_xy.diagonal(); }
};

// x_i = argmax f_i, y_i = argmin f_i (ties broken by lowest vertex index),
// for i = 1..k skipping the constant eigenfunction. k must lie in [1, 3].
AntipodalFrame extract_frame(const Spectrum& spec, const MetricGraph& g, int k);

// Smallest eta (up to strictness) such that the frame satisfies: every
// d(x_i, y_i) > pi - eta and every cross distance between distinct axes is
// within eta of pi/2. All three cross families enter, which makes the value
// exactly invariant under permutations and under swapping any (x_i, y_i).
double pk_deficiency(const AntipodalFrame& frame);

// Expansion of cos d_p in the first k nonconstant eigenfunctions.
struct ProjectionReport {
  int base = -1;
  Eigen::VectorXd coefficients;   // a_i = 3 * mean of cos(d_p) f_i, i = 1..k
  double residual_sup = 0.0;      // max_v |cos d_p(v) - sum a_i f_i(v)|
  double residual_l2 = 0.0;       // area-weighted root mean square of the same
  double coeff_norm_defect = 0.0; // |sum a_i^2 - 1|
};

ProjectionReport project_cos_distance(const Spectrum& spec, const TriSurface& surf,
                                      const MetricGraph& g, int p, int k);

// Max over vertices of |grad f_i|^2 / (2 lambda sup f / (sup - inf)) *
// (sup - f)(f - inf)), the gradient-envelope ratio. Vertices where the
// envelope falls below 1e-12 (the extrema themselves) are excluded: the
// discrete gradient does not vanish there and the ratio is pure noise.
double li_yau_check(const Spectrum& spec, const TriSurface& surf, int i);

enum class RadialKernel { Cos, CosSquared, SinSquared };

// | mean over the surface of u(clamped d_p) - the round-sphere mean |, with
// the sphere side in closed form (0, 1/3, 2/3). Throws NoAntipode unless
// max d_p >= pi - 0.3.
double coarea_comparison(const TriSurface& surf, const Eigen::VectorXd& dist,
                         RadialKernel u);

// Area-weighted mean of |f_i^2 + |grad f_i|^2 - 1|.
double eikonal_defect(const Spectrum& spec, const TriSurface& surf, int i);

// Interior-trapezoid integral of |v'' + v|^2 with centered second differences
// at step h; the two endpoint samples never enter.
double residual_integral(const Eigen::VectorXd& values, double h);

// residual_integral of a vertex field resampled along the shortest graph path
// from a to b. The step adapts to the path: length / max(10, ceil(length /
// mean edge)), the coarsest step the resampler admits, because finer steps
// read the piecewise-linear interpolation kinks instead of the field.
// Requires a != b and path length >= 3 mean edges.
double geodesic_residual(const Eigen::VectorXd& f, const TriSurface& surf,
                         const MetricGraph& g, int a, int b);
double geodesic_residual(const Spectrum& spec, int i, const TriSurface& surf,
                         const MetricGraph& g, int a, int b);

struct ResidualSummary {
  Eigen::VectorXd residuals;  // one per sampled pair, in sampling order
  double median = 0.0;
  double p90 = 0.0;
};

// geodesic_residual over m seeded random vertex pairs, rejected until the
// pair distance lies in [pi/3, 2pi/3]. Deterministic for a fixed seed and
// independent of the thread count (one generator per pair).
ResidualSummary residual_distribution(const Spectrum& spec, int i,
                                      const TriSurface& surf, const MetricGraph& g,
                                      int m, std::uint64_t seed);

}  // namespace pinchlab
