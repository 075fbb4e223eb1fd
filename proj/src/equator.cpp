#include "pinchlab/equator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pinchlab/errors.hpp"
#include "pinchlab/parallel.hpp"
#include "pinchlab/rng.hpp"

namespace pinchlab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd square_sum_field(const Spectrum& spec, int k) {
  if (k < 1 || k + 1 > spec.eigenvalues.size()) {
    throw ValidationError("band order " + std::to_string(k) +
                          " exceeds the retained nonconstant eigenpairs");
  }
  Eigen::VectorXd q = Eigen::VectorXd::Zero(spec.functions.rows());
  for (int i = 1; i <= k; ++i) q += spec.functions.col(i).cwiseAbs2();
  return q;
}

void require_nonempty(const AlmostEquator& equator, const char* what) {
  if (equator.empty()) {
    throw ValidationError(std::string(what) + " needs a nonempty band");
  }
}

double angular(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

}  // namespace

AlmostEquator almost_equator(const Spectrum& spec, const TriSurface& surf, int k,
                             double eta) {
  if (!(eta > 0.0)) throw ValidationError("band width eta must be positive");
  Eigen::VectorXd q = square_sum_field(spec, k);
  AlmostEquator eq;
  eq.k = k;
  eq.eta = eta;
  eq.mask.assign(static_cast<size_t>(q.size()), 0);
  for (int v = 0; v < q.size(); ++v) {
    if (std::abs(q[v] - 1.0) < eta) {
      eq.mask[static_cast<size_t>(v)] = 1;
      eq.vertices.push_back(v);
    }
  }

  // Component labels under the mesh-edge graph restricted to the band.
  std::vector<int> label(static_cast<size_t>(q.size()), -1);
  std::vector<std::vector<int>> neighbors(static_cast<size_t>(q.size()));
  for (Eigen::Index f = 0; f < surf.F.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      int a = surf.F(f, c), b = surf.F(f, (c + 1) % 3);
      neighbors[static_cast<size_t>(a)].push_back(b);
    }
  }
  int next = 0;
  std::vector<int> stack;
  for (int root : eq.vertices) {
    if (label[static_cast<size_t>(root)] != -1) continue;
    label[static_cast<size_t>(root)] = next;
    stack.push_back(root);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : neighbors[static_cast<size_t>(v)]) {
        if (eq.mask[static_cast<size_t>(w)] && label[static_cast<size_t>(w)] == -1) {
          label[static_cast<size_t>(w)] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  eq.component_count = next;
  eq.component.reserve(eq.vertices.size());
  for (int v : eq.vertices) eq.component.push_back(label[static_cast<size_t>(v)]);
  return eq;
}

Eigen::MatrixXd sphere_map(const Spectrum& spec, const AlmostEquator& equator) {
  require_nonempty(equator, "sphere map");
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(equator.vertices.size()), equator.k);
  for (size_t r = 0; r < equator.vertices.size(); ++r) {
    Eigen::VectorXd f(equator.k);
    for (int i = 1; i <= equator.k; ++i) {
      f[i - 1] = spec.functions(equator.vertices[r], i);
    }
    double norm = f.norm();
    if (!(norm > 1e-8)) {
      throw ValidationError("eigenfunction map vanishes on a band vertex");
    }
    phi.row(static_cast<Eigen::Index>(r)) = f.transpose() / norm;
  }
  return phi;
}

double surjectivity_defect(const AlmostEquator& equator, const Eigen::MatrixXd& phi,
                           int m, std::uint64_t seed) {
  require_nonempty(equator, "surjectivity defect");
  if (m < 100) throw ValidationError("surjectivity needs at least 100 samples");
  const int k = equator.k;
  if (phi.cols() != k || phi.rows() != static_cast<Eigen::Index>(equator.vertices.size())) {
    throw ValidationError("sphere-map matrix does not match the band");
  }
  auto rng = seeded_engine(seed, streams::kSurjectivity);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double offset = unit(rng);

  Eigen::MatrixXd targets;
  if (k == 1) {
    targets.resize(2, 1);
    targets << 1.0, -1.0;
  } else if (k == 2) {
    targets.resize(m, 2);
    for (int j = 0; j < m; ++j) {
      double theta = 2.0 * kPi * (static_cast<double>(j) + offset) / static_cast<double>(m);
      targets.row(j) << std::cos(theta), std::sin(theta);
    }
  } else if (k == 3) {
    targets.resize(m, 3);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < m; ++j) {
      double z = 1.0 - 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double theta = golden * static_cast<double>(j) + 2.0 * kPi * offset;
      targets.row(j) << r * std::cos(theta), r * std::sin(theta), z;
    }
  } else {
    throw ValidationError("surjectivity sampling supports k in [1, 3]");
  }

  Eigen::VectorXd worst(targets.rows());
  parallel_for(static_cast<int>(targets.rows()), [&](int j) {
    // max over targets of the angular distance to the nearest mapped vertex
    double best = kPi;
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
      best = std::min(best, angular(targets.row(j).transpose(), phi.row(r).transpose()));
    }
    worst[j] = best;
  });
  return worst.maxCoeff();
}

DistortionResult metric_distortion(const AlmostEquator& equator, const Spectrum& spec,
                                   const MetricGraph& g, int m, std::uint64_t seed) {
  require_nonempty(equator, "metric distortion");
  if (m < 100) throw ValidationError("distortion needs at least 100 sampled pairs");
  if (equator.k + 1 > spec.eigenvalues.size()) {
    throw ValidationError("band order exceeds the retained nonconstant eigenpairs");
  }
  const int count = static_cast<int>(equator.vertices.size());
  Eigen::VectorXd cos_gap(m), ang_gap(m);
  parallel_for(m, [&](int j) {
    auto rng = seeded_engine(mix_seed(seed, streams::kDistortion),
                             static_cast<std::uint64_t>(j));
    std::uniform_int_distribution<int> pick(0, count - 1);
    int rx = pick(rng), ry = pick(rng);
    if (rx == ry) {
      cos_gap[j] = 0.0;
      ang_gap[j] = 0.0;
      return;
    }
    int x = equator.vertices[static_cast<size_t>(rx)];
    int y = equator.vertices[static_cast<size_t>(ry)];
    double d = std::clamp(geodesic_distances(g, x).d[y], 0.0, kPi);
    double inner = 0.0;
    for (int i = 1; i <= equator.k; ++i) {
      inner += spec.functions(x, i) * spec.functions(y, i);
    }
    inner = std::clamp(inner, -1.0, 1.0);
    cos_gap[j] = std::abs(std::cos(d) - inner);
    ang_gap[j] = std::abs(d - std::acos(inner));
  });
  return DistortionResult{cos_gap.maxCoeff(), ang_gap.maxCoeff()};
}

ConvexityResult convexity_defect(const AlmostEquator& inner, const AlmostEquator& outer,
                                 const MetricGraph& g, int m, std::uint64_t seed) {
  require_nonempty(inner, "convexity defect");
  if (inner.mask.size() != outer.mask.size()) {
    throw ValidationError("band masks come from different surfaces");
  }
  for (size_t v = 0; v < inner.mask.size(); ++v) {
    if (inner.mask[v] && !outer.mask[v]) {
      throw ValidationError("inner band is not contained in the outer band");
    }
  }
  if (m < 1) throw ValidationError("convexity needs at least one sampled pair");
  const int count = static_cast<int>(inner.vertices.size());
  Eigen::VectorXd detour(m);
  std::vector<std::uint8_t> cut(static_cast<size_t>(m), 0);
  parallel_for(m, [&](int j) {
    auto rng = seeded_engine(mix_seed(seed, streams::kConvexity),
                             static_cast<std::uint64_t>(j));
    std::uniform_int_distribution<int> pick(0, count - 1);
    int x = inner.vertices[static_cast<size_t>(pick(rng))];
    int y = inner.vertices[static_cast<size_t>(pick(rng))];
    detour[j] = 0.0;
    if (x == y) return;
    double restricted = geodesic_distances(g, x, outer.mask).d[y];
    if (!std::isfinite(restricted)) {
      cut[static_cast<size_t>(j)] = 1;
      return;
    }
    detour[j] = restricted - geodesic_distances(g, x).d[y];
  });
  ConvexityResult r;
  for (int j = 0; j < m; ++j) {
    if (cut[static_cast<size_t>(j)]) {
      ++r.disconnections;
    } else {
      r.defect = std::max(r.defect, detour[j]);
    }
  }
  return r;
}

double antipode_defect(const AlmostEquator& equator, const MetricGraph& g, int m,
                       std::uint64_t seed) {
  require_nonempty(equator, "antipode defect");
  if (m < 1) throw ValidationError("antipode check needs at least one sample");
  const int count = static_cast<int>(equator.vertices.size());
  Eigen::VectorXd gap(m);
  parallel_for(m, [&](int j) {
    auto rng = seeded_engine(mix_seed(seed, streams::kAntipode),
                             static_cast<std::uint64_t>(j));
    std::uniform_int_distribution<int> pick(0, count - 1);
    int x = equator.vertices[static_cast<size_t>(pick(rng))];
    Eigen::VectorXd d = geodesic_distances(g, x).d;
    double farthest = 0.0;
    for (int v : equator.vertices) farthest = std::max(farthest, d[v]);
    gap[j] = kPi - farthest;
  });
  return std::max(0.0, gap.maxCoeff());
}

double equator_gradient_check(const Spectrum& spec, const TriSurface& surf,
                              const AlmostEquator& equator) {
  require_nonempty(equator, "band gradient check");
  Eigen::VectorXd q = square_sum_field(spec, equator.k);
  Eigen::VectorXd gn = vertex_gradient_norms(surf, q);
  double worst = 0.0;
  for (int v : equator.vertices) worst = std::max(worst, gn[v]);
  return worst;
}

double petersen_bound_check(const Spectrum& spec, int k) {
  return square_sum_field(spec, k).maxCoeff();
}

SphereMapReport build_sphere_map_report(const Spectrum& spec, const AlmostEquator& inner,
                                        const AlmostEquator& outer, const MetricGraph& g,
                                        const EquatorSamples& samples,
                                        std::uint64_t seed) {
  SphereMapReport rep;
  rep.k = inner.k;
  rep.phi = sphere_map(spec, inner);
  rep.surjectivity_defect = surjectivity_defect(inner, rep.phi, samples.surjectivity, seed);
  DistortionResult dist = metric_distortion(inner, spec, g, samples.distortion, seed);
  rep.distortion_cos = dist.cos_gap;
  rep.distortion_angular = dist.angular_gap;
  rep.gh_defect = std::max(rep.surjectivity_defect, rep.distortion_angular);
  ConvexityResult conv = convexity_defect(inner, outer, g, samples.convexity, seed);
  rep.convexity_defect = conv.defect;
  rep.disconnections = conv.disconnections;
  rep.antipode_defect = antipode_defect(inner, g, samples.antipode, seed);
  return rep;
}

}  // namespace pinchlab
