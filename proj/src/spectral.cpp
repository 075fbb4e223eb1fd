#include "pinchlab/spectral.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "pinchlab/rng.hpp"

namespace pinchlab {

Eigen::SparseMatrix<double> cotan_stiffness(const TriSurface& s) {
  const Eigen::Index n = s.vertex_count();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(s.F.rows()) * 12);
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    for (int c = 0; c < 3; ++c) {
      int i = s.F(k, c), j = s.F(k, (c + 1) % 3), o = s.F(k, (c + 2) % 3);
      Eigen::Vector3d u = s.V.row(i) - s.V.row(o);
      Eigen::Vector3d v = s.V.row(j) - s.V.row(o);
      double cross = u.cross(v).norm();
      if (!(cross > 1e-15 * (u.norm() * v.norm() + 1e-300))) {
        throw ValidationError("degenerate face " + std::to_string(k) +
                              " in stiffness assembly");
      }
      double w = 0.5 * u.dot(v) / cross;
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
    }
  }
  Eigen::SparseMatrix<double> S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

Eigen::VectorXd lumped_mass(const TriSurface& s) { return vertex_areas(s); }

std::vector<std::pair<int, int>> eigenvalue_clusters(const Eigen::VectorXd& values,
                                                     double rel_gap) {
  std::vector<std::pair<int, int>> out;
  int n = static_cast<int>(values.size());
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    bool close = false;
    if (i < n) {
      double gap = values[i] - values[i - 1];
      double scale = std::max({std::abs(values[i]), std::abs(values[i - 1]), 1.0});
      close = gap < rel_gap * scale;
    }
    if (!close) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

namespace {

// Shift-invert operator for the pencil (S, M) with M diagonal: working in the
// symmetrized variable y = sqrt(M) x, applies (B + cI)^{-1} where
// B = M^{-1/2} S M^{-1/2}.
struct ShiftedInverse {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::VectorXd sqrt_m;
  long applications = 0;

  Eigen::VectorXd apply(const Eigen::VectorXd& y) {
    ++applications;
    Eigen::VectorXd rhs = sqrt_m.cwiseProduct(y);
    Eigen::VectorXd sol = ldlt.solve(rhs);
    return sqrt_m.cwiseProduct(sol);
  }
};

void orthogonalize(const std::vector<Eigen::VectorXd>& basis, Eigen::VectorXd& w) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : basis) w -= q.dot(w) * q;
  }
}

}  // namespace

Spectrum solve_smallest(const Eigen::SparseMatrix<double>& stiffness,
                        const Eigen::VectorXd& mass, const EigOptions& opts) {
  const int n = static_cast<int>(stiffness.rows());
  if (opts.count < 1 || opts.count > 64) {
    throw ValidationError("eigenpair count must lie in [1, 64], got " +
                          std::to_string(opts.count));
  }
  if (opts.count >= n) {
    throw ValidationError("eigenpair count " + std::to_string(opts.count) +
                          " must be below the vertex count " + std::to_string(n));
  }
  if ((mass.array() <= 0.0).any()) {
    throw ValidationError("mass matrix must be positive");
  }

  const double shift = 1.0;
  ShiftedInverse op;
  op.sqrt_m = mass.cwiseSqrt();
  Eigen::SparseMatrix<double> shifted = stiffness;
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift * mass[i];
  op.ldlt.compute(shifted);
  if (op.ldlt.info() != Eigen::Success) {
    throw SolverError("sparse factorization of the shifted operator failed");
  }

  const int krylov_cap = std::min(n, std::max(3 * opts.count + 32, 64));

  std::mt19937_64 rng = seeded_engine(opts.seed, streams::kEigensolver);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vector = [&] {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    return v;
  };

  std::vector<Eigen::VectorXd> locked;      // converged y-vectors
  std::vector<double> locked_values;        // corresponding lambda
  std::vector<double> locked_residuals;     // certified |S x - lambda M x| / |M x|

  while (static_cast<int>(locked.size()) < opts.count) {
    if (op.applications >= opts.max_iterations) {
      throw SolverError("eigensolver iteration budget exhausted with " +
                        std::to_string(locked.size()) + " of " +
                        std::to_string(opts.count) + " pairs converged");
    }
    Eigen::VectorXd v = random_vector();
    orthogonalize(locked, v);
    double nv = v.norm();
    if (nv < 1e-12) continue;
    v /= nv;

    std::vector<Eigen::VectorXd> basis{v};
    std::vector<double> alpha, beta;
    bool exhausted = false;
    while (static_cast<int>(basis.size()) < krylov_cap &&
           op.applications < opts.max_iterations && !exhausted) {
      Eigen::VectorXd w = op.apply(basis.back());
      double a = basis.back().dot(w);
      alpha.push_back(a);
      // Project out the locked set last: basis vectors carry O(eps) locked
      // residue, and the shift-invert apply amplifies those directions every
      // step, so any residue reintroduced after this projection compounds.
      orthogonalize(basis, w);
      orthogonalize(locked, w);
      double b = w.norm();
      if (b < 1e-13) {
        exhausted = true;  // Krylov space spanned; extract what is there
        break;
      }
      beta.push_back(b);
      basis.push_back(w / b);
    }

    int m = static_cast<int>(alpha.size());
    if (m == 0) continue;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) throw SolverError("tridiagonal eigensolve failed");

    // Walk Ritz values from the largest mu (smallest lambda); lock the
    // converged prefix so no smaller eigenvalue can be skipped.
    bool locked_any = false;
    for (int r = m - 1; r >= 0; --r) {
      if (static_cast<int>(locked.size()) >= opts.count) break;
      double mu = es.eigenvalues()[r];
      if (mu <= 0.0) break;
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
      for (int i = 0; i < m; ++i) y += es.eigenvectors()(i, r) * basis[static_cast<size_t>(i)];
      orthogonalize(locked, y);
      double ny = y.norm();
      if (ny < 1e-8) continue;
      y /= ny;
      double lambda = 1.0 / mu - shift;
      Eigen::VectorXd x = y.cwiseQuotient(op.sqrt_m);
      Eigen::VectorXd mx = mass.cwiseProduct(x);
      Eigen::VectorXd resid = stiffness * x - lambda * mx;
      double rel = resid.norm() / mx.norm();
      if (rel <= opts.tol) {
        locked.push_back(y);
        locked_values.push_back(lambda);
        locked_residuals.push_back(rel);
        locked_any = true;
      } else {
        break;
      }
    }
    (void)locked_any;
  }

  std::vector<int> order(locked.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return locked_values[static_cast<size_t>(a)] <
                                       locked_values[static_cast<size_t>(b)]; });

  Spectrum spec;
  spec.eigenvalues.resize(opts.count);
  spec.functions.resize(n, opts.count);
  spec.residuals.resize(opts.count);
  for (int i = 0; i < opts.count; ++i) {
    int src = order[static_cast<size_t>(i)];
    spec.eigenvalues[i] = locked_values[static_cast<size_t>(src)];
    spec.functions.col(i) = locked[static_cast<size_t>(src)].cwiseQuotient(op.sqrt_m);
    spec.residuals[i] = locked_residuals[static_cast<size_t>(src)];
  }
  spec.volume = mass.sum();
  spec.clusters = eigenvalue_clusters(spec.eigenvalues);
  return spec;
}

Spectrum solve_smallest(const TriSurface& s, const EigOptions& opts) {
  return solve_smallest(cotan_stiffness(s), lumped_mass(s), opts);
}

namespace {

// Index of the first maximal entry.
int first_argmax(const Eigen::VectorXd& f) {
  int best = 0;
  for (int i = 1; i < f.size(); ++i) {
    if (f[i] > f[best]) best = i;
  }
  return best;
}

}  // namespace

void normalize_mean_square(Spectrum& spec, const Eigen::VectorXd& mass) {
  const int count = static_cast<int>(spec.eigenvalues.size());
  const double volume = mass.sum();
  spec.volume = volume;

  // Localization rotation inside each degenerate cluster: repeatedly take the
  // vertex with the largest remaining pointwise energy and rotate the basis so
  // one vector concentrates there.
  for (const auto& [b, e] : spec.clusters) {
    int m = e - b;
    if (m < 2) continue;
    Eigen::MatrixXd W = spec.functions.middleCols(b, m);
    for (int t = 0; t < m - 1; ++t) {
      int rest = m - t;
      Eigen::VectorXd energy = W.middleCols(t, rest).rowwise().squaredNorm();
      int vstar = first_argmax(energy);
      Eigen::VectorXd w = W.row(vstar).segment(t, rest).transpose();
      double nw = w.norm();
      if (nw < 1e-14) continue;
      w /= nw;
      // Householder taking e1 to w; applied on the right it rotates the block
      // so column t becomes W * w.
      Eigen::VectorXd u = w;
      u[0] -= 1.0;
      double nu = u.squaredNorm();
      Eigen::MatrixXd H = Eigen::MatrixXd::Identity(rest, rest);
      if (nu > 1e-28) H -= (2.0 / nu) * u * u.transpose();
      W.middleCols(t, rest) = (W.middleCols(t, rest) * H).eval();
    }
    spec.functions.middleCols(b, m) = W;
  }

  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd f = spec.functions.col(i);
    double msq = f.cwiseProduct(mass.cwiseProduct(f)).sum();
    if (!(msq > 0.0)) throw SolverError("eigenfunction with zero mass norm");
    f *= std::sqrt(volume / (3.0 * msq));
    int amax = first_argmax(f);
    int amin = first_argmax((-f).eval());
    if (amin < amax || (amin == amax && f[amax] < 0.0)) f = -f;
    spec.functions.col(i) = f;
  }
}

Eigen::MatrixX3d face_gradients(const TriSurface& s, const Eigen::VectorXd& f) {
  Eigen::MatrixX3d g(s.F.rows(), 3);
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    int i = s.F(k, 0), j = s.F(k, 1), l = s.F(k, 2);
    Eigen::Vector3d pi = s.V.row(i), pj = s.V.row(j), pl = s.V.row(l);
    Eigen::Vector3d normal = (pj - pi).cross(pl - pi);
    double a2 = normal.norm();  // twice the face area
    if (!(a2 > 0.0)) throw ValidationError("degenerate face " + std::to_string(k) +
                                           " in gradient evaluation");
    normal /= a2;
    Eigen::Vector3d num = f[i] * (pl - pj) + f[j] * (pi - pl) + f[l] * (pj - pi);
    g.row(k) = normal.cross(num) / a2;
  }
  return g;
}

Eigen::VectorXd vertex_gradient_norms(const TriSurface& s, const Eigen::VectorXd& f) {
  Eigen::MatrixX3d g = face_gradients(s, f);
  Eigen::VectorXd fa = face_areas(s);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(s.V.rows());
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(s.V.rows());
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    double gn = g.row(k).norm();
    for (int c = 0; c < 3; ++c) {
      acc[s.F(k, c)] += fa[k] / 3.0 * gn;
      wsum[s.F(k, c)] += fa[k] / 3.0;
    }
  }
  return acc.cwiseQuotient(wsum);
}

void to_json(nlohmann::ordered_json& j, const Spectrum& spec) {
  j = nlohmann::ordered_json::object();
  j["eigenvalues"] = std::vector<double>(spec.eigenvalues.begin(), spec.eigenvalues.end());
  j["residuals"] = std::vector<double>(spec.residuals.begin(), spec.residuals.end());
  j["volume"] = spec.volume;
  auto clusters = nlohmann::ordered_json::array();
  for (const auto& [b, e] : spec.clusters) clusters.push_back({b, e});
  j["clusters"] = clusters;
  auto funcs = nlohmann::ordered_json::array();
  for (int i = 0; i < spec.functions.cols(); ++i) {
    funcs.push_back(std::vector<double>(spec.functions.col(i).begin(),
                                        spec.functions.col(i).end()));
  }
  j["functions"] = funcs;
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
  Spectrum spec;
  std::vector<double> vals = j.at("eigenvalues").get<std::vector<double>>();
  spec.eigenvalues = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  std::vector<double> res = j.at("residuals").get<std::vector<double>>();
  spec.residuals = Eigen::Map<Eigen::VectorXd>(res.data(), static_cast<Eigen::Index>(res.size()));
  spec.volume = j.at("volume").get<double>();
  for (const auto& c : j.at("clusters")) {
    spec.clusters.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
  }
  const auto& funcs = j.at("functions");
  if (!funcs.empty()) {
    Eigen::Index rows = static_cast<Eigen::Index>(funcs.front().size());
    spec.functions.resize(rows, static_cast<Eigen::Index>(funcs.size()));
    for (Eigen::Index i = 0; i < spec.functions.cols(); ++i) {
      std::vector<double> col = funcs[static_cast<size_t>(i)].get<std::vector<double>>();
      spec.functions.col(i) = Eigen::Map<Eigen::VectorXd>(col.data(), rows);
    }
  }
  return spec;
}

}  // namespace pinchlab
