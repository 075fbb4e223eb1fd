#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <utility>
#include <vector>

#include "pinchlab/surface.hpp"

#include <nlohmann/json.hpp>

namespace pinchlab {

// Piecewise-linear FEM pair for the Laplace-Beltrami operator: cotangent
// stiffness S (positive semidefinite, kernel = constants) and diagonal
// barycentric mass M, eigenproblem S f = lambda M f.
Eigen::SparseMatrix<double> cotan_stiffness(const TriSurface& s);
Eigen::VectorXd lumped_mass(const TriSurface& s);

struct EigOptions {
  int count = 9;             // smallest eigenpairs requested, at most 64
  double tol = 1e-10;        // relative residual tolerance
  std::uint64_t seed = 42;   // start-vector seed
  int max_iterations = 10000;  // total operator applications
};

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd functions;     // vertex_count x count, column i pairs with eigenvalues[i]
  // Per-pair relative residual |S f - lambda M f| / |M f| as certified by the
  // solver. Frozen at solve time: gauge rotations inside a near-degenerate
  // cluster can mix eigenvalues, so the field documents the solver basis.
  Eigen::VectorXd residuals;
  double volume = 0.0;           // total surface area
  // Half-open index ranges of eigenvalues with pairwise relative gap < 1e-3.
  std::vector<std::pair<int, int>> clusters;
};

// Groups consecutive eigenvalues whose relative gap is below rel_gap.
std::vector<std::pair<int, int>> eigenvalue_clusters(const Eigen::VectorXd& values,
                                                     double rel_gap = 1e-3);

// Shift-invert Lanczos with full reorthogonalization for the smallest
// eigenpairs of (S, M). Deterministic for a fixed seed; throws SolverError if
// the iteration budget runs out before all requested pairs converge.
Spectrum solve_smallest(const Eigen::SparseMatrix<double>& stiffness,
                        const Eigen::VectorXd& mass, const EigOptions& opts = {});

Spectrum solve_smallest(const TriSurface& s, const EigOptions& opts = {});

// Fixes the scale and gauge of every eigenfunction in place:
//  - inside each eigenvalue cluster, rotates to the basis produced by
//    successive argmax localization (each vector peaks at a distinct vertex);
//  - scales so the area-weighted mean square is exactly 1/3;
//  - flips signs so the lowest-index argmax vertex precedes the lowest-index
//    argmin vertex (a sign-invariant gauge).
void normalize_mean_square(Spectrum& spec, const Eigen::VectorXd& mass);

// Constant gradient of the linear interpolant per face.
Eigen::MatrixX3d face_gradients(const TriSurface& s, const Eigen::VectorXd& f);
// Area-weighted average of incident face gradient norms.
Eigen::VectorXd vertex_gradient_norms(const TriSurface& s, const Eigen::VectorXd& f);

void to_json(nlohmann::ordered_json& j, const Spectrum& spec);
Spectrum spectrum_from_json(const nlohmann::json& j);

}  // namespace pinchlab
