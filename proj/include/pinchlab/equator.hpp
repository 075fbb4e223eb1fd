#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pinchlab/metric.hpp"
#include "pinchlab/spectral.hpp"
#include "pinchlab/surface.hpp"

namespace pinchlab {

// Vertex band where the sum of squares of the first k nonconstant
// eigenfunctions is within eta of 1. An empty band is a valid outcome and is
// reported as such, never thrown.
struct AlmostEquator {
  int k = 0;
  double eta = 0.0;
  std::vector<int> vertices;           // ascending subset indices
  std::vector<std::uint8_t> mask;      // size vertex_count, 1 on the subset
  std::vector<int> component;          // component label per subset entry
  int component_count = 0;             // components of the restricted edge graph

  bool empty() const { return vertices.empty(); }
};

AlmostEquator almost_equator(const Spectrum& spec, const TriSurface& surf, int k,
                             double eta);

// Row-wise unit normalization of F = (f_1 .. f_k) on the band vertices.
// Throws if the band is empty or F nearly vanishes at a band vertex.
Eigen::MatrixXd sphere_map(const Spectrum& spec, const AlmostEquator& equator);

// Max over m quasi-uniform sample directions of S^{k-1} (antipodal points for
// k=1, uniform angles for k=2, Fibonacci lattice for k=3, global seeded
// offset) of the angular distance to the nearest mapped band vertex.
double surjectivity_defect(const AlmostEquator& equator, const Eigen::MatrixXd& phi,
                           int m, std::uint64_t seed);

struct DistortionResult {
  double cos_gap = 0.0;      // max |cos d(x,y) - <F(x), F(y)>|
  double angular_gap = 0.0;  // max |d(x,y) - arccos <F(x), F(y)>|, d clamped to [0, pi]
};

// Both gaps over m seeded vertex pairs drawn from the band (equal pairs are
// legal and contribute zero). F is the raw eigenfunction map (f_1 .. f_k): on
// a band of nonzero width, normalizing F would misread the across-band
// separation as zero angle, so the angular gap keeps the unnormalized inner
// product under the arccos.
DistortionResult metric_distortion(const AlmostEquator& equator, const Spectrum& spec,
                                   const MetricGraph& g, int m, std::uint64_t seed);

struct ConvexityResult {
  double defect = 0.0;    // max over connected pairs of d_restricted - d
  int disconnections = 0; // pairs unreachable inside the outer band
};

// Detour cost of staying inside the outer band, sampled over m pairs from the
// inner band. Requires inner to be a subset of outer.
ConvexityResult convexity_defect(const AlmostEquator& inner, const AlmostEquator& outer,
                                 const MetricGraph& g, int m, std::uint64_t seed);

// Max over m sampled band vertices of (pi - farthest band vertex), floored at
// zero: how far the band is from containing an antipode of each of its points.
double antipode_defect(const AlmostEquator& equator, const MetricGraph& g, int m,
                       std::uint64_t seed);

// Max over band vertices of |grad sum_{i<=k} f_i^2|.
double equator_gradient_check(const Spectrum& spec, const TriSurface& surf,
                              const AlmostEquator& equator);

// Max over all vertices of sum_{i<=k} f_i^2.
double petersen_bound_check(const Spectrum& spec, int k);

// Aggregated sphere-map quality for one (k, eta, eta') setting.
struct SphereMapReport {
  int k = 0;
  Eigen::MatrixXd phi;            // band vertices x k, unit rows
  double surjectivity_defect = 0.0;
  double distortion_cos = 0.0;
  double distortion_angular = 0.0;
  double gh_defect = 0.0;         // max(surjectivity_defect, distortion_angular)
  double convexity_defect = 0.0;
  int disconnections = 0;
  double antipode_defect = 0.0;
};

struct EquatorSamples {
  int surjectivity = 500;
  int distortion = 1000;
  int convexity = 200;
  int antipode = 200;
};

SphereMapReport build_sphere_map_report(const Spectrum& spec, const AlmostEquator& inner,
                                        const AlmostEquator& outer, const MetricGraph& g,
                                        const EquatorSamples& samples,
                                        std::uint64_t seed);

}  // namespace pinchlab
