#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

#include "pinchlab/errors.hpp"

namespace pinchlab {

// Closed oriented triangle mesh. V holds vertex positions row-wise, F holds
// counter-clockwise vertex index triples.
struct TriSurface {
  Eigen::MatrixX3d V;
  Eigen::MatrixX3i F;

  Eigen::Index vertex_count() const { return V.rows(); }
  Eigen::Index face_count() const { return F.rows(); }
};

// Rotationally symmetric two-lobe profile: a Cassini oval of revolution,
// r(z)^2 = -(z^2 + z0^2) + sqrt(4 z0^2 z^2 + b^4), scaled by a fixed factor.
// neck -> 1 degenerates to a round sphere of radius scale*b; a waist (and with
// it negative Gauss curvature) appears for neck < 1/sqrt(2).
struct DumbbellProfile {
  double neck = 0.0;   // requested neck-to-lobe ratio, in (0, 1)
  double scale = 0.0;  // overall size factor applied to the unit profile
  double z0 = 0.0;     // focus offset of the scaled profile
  double b = 0.0;      // Cassini constant of the scaled profile
  double z_end = 0.0;  // axial half-extent, sqrt(z0^2 + b^2)

  double radius(double z) const;           // r(z) >= 0
  double gauss_curvature(double z) const;  // closed form -r'' / (r (1+r'^2)^2)
};

// Base size of the dumbbell profile. Kept well under the unit sphere so the
// intrinsic diameter stays clearly below pi for every neck value.
constexpr double kDumbbellScale = 0.55;

DumbbellProfile dumbbell_profile(double neck);

// Generators. subdivisions counts 4-way refinements of the base icosahedron
// and must lie in [0, 8]. Vertex 0 sits at the +z pole, vertex 11 at -z.
TriSurface icosphere(int subdivisions);
// Unit sphere stretched to (1, 1, ratio); ratio in [0.2, 5].
TriSurface spheroid(double ratio, int subdivisions);
// Surface of revolution of the dumbbell profile, meshed by mapping the
// icosphere's latitude to the axial coordinate; neck in (0, 1).
TriSurface dumbbell(double neck, int subdivisions);

// Structural checks: triangles reference valid vertices, every edge is shared
// by exactly two faces with opposite orientation, the mesh is connected, and
// no face is degenerate. Throws ValidationError.
void validate_surface(const TriSurface& s);

double total_area(const TriSurface& s);
Eigen::VectorXd face_areas(const TriSurface& s);
// Barycentric vertex areas: one third of each incident face.
Eigen::VectorXd vertex_areas(const TriSurface& s);
// Discrete Gauss curvature: angle defect divided by the barycentric area.
Eigen::VectorXd angle_defect_curvature(const TriSurface& s);

double mean_edge_length(const TriSurface& s);
double max_edge_length(const TriSurface& s);

struct RescaleResult {
  TriSurface surface;
  double scale = 1.0;          // factor applied to positions
  double min_curvature = 0.0;  // discrete minimum before rescaling
};

// Uniformly scales the surface so that the discrete minimum Gauss curvature
// becomes exactly 1. Throws HypothesisViolation when the minimum is <= 0.
RescaleResult rescale_min_curvature_to_one(const TriSurface& s);

// ASCII OFF with full double precision; writes are atomic (temp + rename).
TriSurface read_off(std::istream& in, const std::string& name = "<stream>");
TriSurface read_off_file(const std::string& path);
void write_off(const TriSurface& s, std::ostream& out);
void write_off_file(const TriSurface& s, const std::string& path);

}  // namespace pinchlab
