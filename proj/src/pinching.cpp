#include "pinchlab/pinching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/rng.hpp"
#include "pinchlab/stats.hpp"

namespace pinchlab {

namespace {

constexpr double kPi = std::numbers::pi;

int first_extremum(const Eigen::VectorXd& f, bool maximum) {
  int best = 0;
  for (int v = 1; v < f.size(); ++v) {
    if (maximum ? f[v] > f[best] : f[v] < f[best]) best = v;
  }
  return best;
}

void check_eigen_index(const Spectrum& spec, int i) {
  if (i < 1 || i >= spec.eigenvalues.size()) {
    throw ValidationError("eigenfunction index " + std::to_string(i) +
                          " outside the retained nonconstant range");
  }
}

}  // namespace

AntipodalFrame extract_frame(const Spectrum& spec, const MetricGraph& g, int k) {
  if (k < 1 || k > 3) {
    throw ValidationError("frame size must lie in [1, 3], got " + std::to_string(k));
  }
  if (k + 1 > spec.eigenvalues.size()) {
    throw ValidationError("frame size " + std::to_string(k) +
                          " exceeds the retained nonconstant eigenpairs");
  }
  AntipodalFrame frame;
  frame.k = k;
  std::vector<Eigen::VectorXd> from_x(static_cast<size_t>(k));
  std::vector<Eigen::VectorXd> from_y(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd f = spec.functions.col(i + 1);
    int x = first_extremum(f, true);
    int y = first_extremum(f, false);
    frame.pairs.push_back({x, y});
  }
  parallel_for(2 * k, [&](int job) {
    int i = job / 2;
    int v = frame.pairs[static_cast<size_t>(i)][job % 2];
    auto& slot = job % 2 == 0 ? from_x[static_cast<size_t>(i)] : from_y[static_cast<size_t>(i)];
    slot = geodesic_distances(g, v).d;
  });
  frame.dist_xx.resize(k, k);
  frame.dist_xy.resize(k, k);
  frame.dist_yy.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      frame.dist_xx(i, j) = from_x[static_cast<size_t>(i)][frame.pairs[static_cast<size_t>(j)][0]];
      frame.dist_xy(i, j) = from_x[static_cast<size_t>(i)][frame.pairs[static_cast<size_t>(j)][1]];
      frame.dist_yy(i, j) = from_y[static_cast<size_t>(i)][frame.pairs[static_cast<size_t>(j)][1]];
    }
  }
  return frame;
}

double pk_deficiency(const AntipodalFrame& frame) {
  if (frame.k < 1) throw ValidationError("frame is empty");
  double eta = 0.0;
  for (int i = 0; i < frame.k; ++i) {
    eta = std::max(eta, kPi - frame.dist_xy(i, i));
    for (int j = 0; j < frame.k; ++j) {
      if (j == i) continue;
      eta = std::max({eta, std::abs(frame.dist_xx(i, j) - kPi / 2.0),
                      std::abs(frame.dist_xy(i, j) - kPi / 2.0),
                      std::abs(frame.dist_yy(i, j) - kPi / 2.0)});
    }
  }
  return eta;
}

ProjectionReport project_cos_distance(const Spectrum& spec, const TriSurface& surf,
                                      const MetricGraph& g, int p, int k) {
  if (k < 0 || k + 1 > spec.eigenvalues.size()) {
    throw ValidationError("projection order " + std::to_string(k) +
                          " exceeds the retained nonconstant eigenpairs");
  }
  const Eigen::VectorXd area = vertex_areas(surf);
  const double volume = area.sum();
  Eigen::VectorXd cosd = geodesic_distances(g, p).d;
  for (int v = 0; v < cosd.size(); ++v) {
    cosd[v] = std::cos(std::clamp(cosd[v], 0.0, kPi));
  }

  ProjectionReport rep;
  rep.base = p;
  rep.coefficients.resize(k);
  Eigen::VectorXd model = Eigen::VectorXd::Zero(cosd.size());
  for (int i = 0; i < k; ++i) {
    const Eigen::VectorXd f = spec.functions.col(i + 1);
    rep.coefficients[i] = 3.0 / volume * (area.array() * cosd.array() * f.array()).sum();
    model += rep.coefficients[i] * f;
  }
  Eigen::VectorXd r = (cosd - model).cwiseAbs();
  rep.residual_sup = r.maxCoeff();
  rep.residual_l2 = std::sqrt((area.array() * r.array().square()).sum() / volume);
  rep.coeff_norm_defect = std::abs(rep.coefficients.squaredNorm() - 1.0);
  return rep;
}

double li_yau_check(const Spectrum& spec, const TriSurface& surf, int i) {
  check_eigen_index(spec, i);
  const double lambda = spec.eigenvalues[i];
  if (!(lambda > 0.0)) {
    throw ValidationError("gradient envelope needs a positive eigenvalue");
  }
  const Eigen::VectorXd f = spec.functions.col(i);
  const Eigen::VectorXd gn = vertex_gradient_norms(surf, f);
  const double sup = f.maxCoeff(), inf = f.minCoeff();
  const double factor = 2.0 * lambda * sup / (sup - inf);
  double worst = 0.0;
  for (int v = 0; v < f.size(); ++v) {
    double envelope = factor * (sup - f[v]) * (f[v] - inf);
    if (envelope <= 1e-12) continue;  // the extrema: pure discretization noise
    worst = std::max(worst, gn[v] * gn[v] / envelope);
  }
  return worst;
}

double coarea_comparison(const TriSurface& surf, const Eigen::VectorXd& dist,
                         RadialKernel u) {
  if (dist.maxCoeff() < kPi - 0.3) {
    throw NoAntipode("farthest vertex at distance " + std::to_string(dist.maxCoeff()) +
                     " < pi - 0.3: base point has no near-antipode");
  }
  const Eigen::VectorXd area = vertex_areas(surf);
  double mean = 0.0;
  for (int v = 0; v < dist.size(); ++v) {
    double c = std::cos(std::clamp(dist[v], 0.0, kPi));
    double val = 0.0;
    switch (u) {
      case RadialKernel::Cos: val = c; break;
      case RadialKernel::CosSquared: val = c * c; break;
      case RadialKernel::SinSquared: val = 1.0 - c * c; break;
    }
    mean += area[v] * val;
  }
  mean /= area.sum();
  double sphere = u == RadialKernel::Cos ? 0.0
                  : u == RadialKernel::CosSquared ? 1.0 / 3.0
                                                  : 2.0 / 3.0;
  return std::abs(mean - sphere);
}

double eikonal_defect(const Spectrum& spec, const TriSurface& surf, int i) {
  check_eigen_index(spec, i);
  const Eigen::VectorXd f = spec.functions.col(i);
  const Eigen::VectorXd gn = vertex_gradient_norms(surf, f);
  const Eigen::VectorXd area = vertex_areas(surf);
  double acc = 0.0;
  for (int v = 0; v < f.size(); ++v) {
    acc += area[v] * std::abs(f[v] * f[v] + gn[v] * gn[v] - 1.0);
  }
  return acc / area.sum();
}

double residual_integral(const Eigen::VectorXd& values, double h) {
  const int n = static_cast<int>(values.size());
  if (n < 4) throw ValidationError("residual integral needs at least 4 samples");
  if (!(h > 0.0)) throw ValidationError("residual integral needs a positive step");
  double acc = 0.0;
  for (int j = 1; j < n - 1; ++j) {
    double second = (values[j - 1] - 2.0 * values[j] + values[j + 1]) / (h * h);
    double z = second + values[j];
    double w = (j == 1 || j == n - 2) ? 0.5 : 1.0;
    acc += w * z * z;
  }
  return acc * h;
}

double geodesic_residual(const Eigen::VectorXd& f, const TriSurface& surf,
                         const MetricGraph& g, int a, int b) {
  if (a == b) throw ValidationError("path endpoints coincide");
  double l = geodesic_distances(g, a).d[b];
  if (!std::isfinite(l)) {
    throw ValidationError("endpoints are not connected by any path");
  }
  if (l < 3.0 * g.mean_edge) {
    throw ValidationError("path of length " + std::to_string(l) +
                          " too short for the residual stencil");
  }
  // Coarsest admissible step: the profile is piecewise linear between path
  // vertices, and second differences taken below that scale read the
  // interpolation kinks instead of the function. Ten intervals minimum keep
  // the dropped-endpoint stencil populated on coarse meshes.
  int intervals = std::max(10, static_cast<int>(std::ceil(l / g.mean_edge)));
  GeodesicPath path = geodesic_path(surf, g, a, b, l / static_cast<double>(intervals));
  return residual_integral(sample_along(path, f), path.h);
}

double geodesic_residual(const Spectrum& spec, int i, const TriSurface& surf,
                         const MetricGraph& g, int a, int b) {
  check_eigen_index(spec, i);
  return geodesic_residual(spec.functions.col(i), surf, g, a, b);
}

ResidualSummary residual_distribution(const Spectrum& spec, int i,
                                      const TriSurface& surf, const MetricGraph& g,
                                      int m, std::uint64_t seed) {
  check_eigen_index(spec, i);
  if (m < 10) throw ValidationError("need at least 10 sampled pairs");
  ResidualSummary summary;
  summary.residuals.resize(m);
  const Eigen::VectorXd f = spec.functions.col(i);
  parallel_for(m, [&](int j) {
    auto rng = seeded_engine(mix_seed(seed, streams::kResidualPairs),
                             static_cast<std::uint64_t>(j));
    std::uniform_int_distribution<int> pick(0, g.n - 1);
    for (int attempt = 0; attempt < 200; ++attempt) {
      int a = pick(rng), b = pick(rng);
      if (a == b) continue;
      double d = geodesic_distances(g, a).d[b];
      if (d < kPi / 3.0 || d > 2.0 * kPi / 3.0) continue;
      summary.residuals[j] = geodesic_residual(f, surf, g, a, b);
      return;
    }
    throw ValidationError("no vertex pair with distance in [pi/3, 2pi/3] found");
  });
  std::vector<double> vals(summary.residuals.begin(), summary.residuals.end());
  summary.median = median(vals);
  summary.p90 = quantile(vals, 0.9);
  return summary;
}

}  // namespace pinchlab
