#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pinchlab/surface.hpp"

namespace pinchlab {

// Shortest-path graph over mesh vertices. Arcs are the mesh edges, optionally
// augmented with one straight chord per interior edge: the two opposite
// vertices joined across the unfolding of the two incident faces, added only
// when the unfolded segment actually crosses the shared edge.
struct MetricGraph {
  enum class Method { EdgeGraph, EdgeGraphWithChords };

  int n = 0;
  Method method = Method::EdgeGraphWithChords;
  std::vector<int> offsets;                // CSR over vertices
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<std::array<int, 2>> gates;   // chord arcs: shared-edge endpoints; {-1,-1} for mesh edges
  double mean_edge = 0.0;                  // mesh edges only
  double max_edge = 0.0;

  // Step used when sampling functions along paths.
  double sampling_step() const { return 0.5 * mean_edge; }
};

const char* method_name(MetricGraph::Method m);

MetricGraph build_metric_graph(const TriSurface& s,
                               MetricGraph::Method method = MetricGraph::Method::EdgeGraphWithChords);

// Distances from one source; unreachable vertices hold +infinity.
struct DistanceField {
  int source = -1;
  MetricGraph::Method method = MetricGraph::Method::EdgeGraphWithChords;
  Eigen::VectorXd d;
};

DistanceField geodesic_distances(const MetricGraph& g, int source);

// Paths restricted to vertices with mask != 0; chords additionally require
// their shared-edge endpoints inside the mask. The source must be masked in.
DistanceField geodesic_distances(const MetricGraph& g, int source,
                                 const std::vector<std::uint8_t>& mask);

struct PathProfile {
  std::vector<int> vertices;  // a .. b inclusive
  std::vector<double> t;      // cumulative arclength, t.front() == 0
  double length = 0.0;
};

PathProfile shortest_path(const MetricGraph& g, int a, int b);

// Shortest graph path between two vertices resampled at uniform arclength
// step h, with positions interpolated linearly along the polyline.
struct GeodesicPath {
  std::vector<int> vertices;   // a .. b inclusive
  std::vector<double> t;       // cumulative arclength at path vertices
  double length = 0.0;
  double h = 0.0;              // resampling step
  Eigen::VectorXd s;           // resample arclengths 0, h, 2h, ... (strictly increasing)
  Eigen::MatrixX3d positions;  // one row per resample arclength
};

// Requires h <= mean mesh edge length. a == b yields the single-point path.
GeodesicPath geodesic_path(const TriSurface& surf, const MetricGraph& g, int a, int b,
                           double h);

// Vertex-function values at the resample arclengths, linear in arclength
// between consecutive path vertices.
Eigen::VectorXd sample_along(const GeodesicPath& path, const Eigen::VectorXd& f);

struct EccentricityResult {
  Eigen::VectorXd ecc;  // per-vertex farthest distance
  double diameter = 0.0;
  double radius = 0.0;
};

// All-source sweep; parallel over sources.
EccentricityResult eccentricities(const MetricGraph& g);

// sup_x (d(p,x) + d(q,x)) - d(p,q): how far the pair (p,q) is from lying on a
// line through every point.
double vertex_excess(const MetricGraph& g, int p, int q);

}  // namespace pinchlab
