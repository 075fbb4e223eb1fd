#include "pinchlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "pinchlab/parallel.hpp"

namespace pinchlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  int from, to;
  double w;
  std::array<int, 2> gate;
};

}  // namespace

const char* method_name(MetricGraph::Method m) {
  return m == MetricGraph::Method::EdgeGraph ? "edge-graph" : "edge-graph-with-chords";
}

MetricGraph build_metric_graph(const TriSurface& s, MetricGraph::Method method) {
  MetricGraph g;
  g.n = static_cast<int>(s.vertex_count());
  g.method = method;

  // Undirected mesh edges with their opposite vertices (two per interior edge).
  std::map<std::pair<int, int>, std::array<int, 2>> opposite;
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    for (int c = 0; c < 3; ++c) {
      int a = s.F(k, c), b = s.F(k, (c + 1) % 3), o = s.F(k, (c + 2) % 3);
      auto key = std::minmax(a, b);
      auto [it, fresh] = opposite.emplace(key, std::array<int, 2>{o, -1});
      if (!fresh) it->second[1] = o;
    }
  }

  std::vector<Arc> arcs;
  arcs.reserve(opposite.size() * 4);
  double edge_sum = 0.0;
  long edge_count = 0;
  for (const auto& [e, opp] : opposite) {
    int u = e.first, w = e.second;
    double len = (s.V.row(u) - s.V.row(w)).norm();
    edge_sum += len;
    ++edge_count;
    g.max_edge = std::max(g.max_edge, len);
    arcs.push_back({u, w, len, {-1, -1}});
    arcs.push_back({w, u, len, {-1, -1}});

    if (method != MetricGraph::Method::EdgeGraphWithChords) continue;
    if (opp[0] < 0 || opp[1] < 0) continue;
    int a = opp[0], b = opp[1];

    // Unfold both faces into the plane: u -> (0,0), w -> (L,0), a above, b below.
    double L = len;
    auto place = [&](int v, double sign, double& x, double& y) {
      double du = (s.V.row(v) - s.V.row(u)).norm();
      double dw = (s.V.row(v) - s.V.row(w)).norm();
      x = (du * du + L * L - dw * dw) / (2.0 * L);
      y = sign * std::sqrt(std::max(du * du - x * x, 0.0));
    };
    double ax, ay, bx, by;
    place(a, +1.0, ax, ay);
    place(b, -1.0, bx, by);
    if (ay <= 0.0 || by >= 0.0) continue;
    double t = ay / (ay - by);
    double xc = ax + t * (bx - ax);
    if (!(xc > 0.0 && xc < L)) continue;  // straight segment misses the shared edge
    double chord = std::hypot(bx - ax, by - ay);
    arcs.push_back({a, b, chord, {u, w}});
    arcs.push_back({b, a, chord, {u, w}});
  }
  if (edge_count > 0) g.mean_edge = edge_sum / static_cast<double>(edge_count);

  std::sort(arcs.begin(), arcs.end(), [](const Arc& p, const Arc& q) {
    if (p.from != q.from) return p.from < q.from;
    if (p.to != q.to) return p.to < q.to;
    return p.w < q.w;
  });
  g.offsets.assign(static_cast<size_t>(g.n) + 1, 0);
  for (const Arc& a : arcs) ++g.offsets[static_cast<size_t>(a.from) + 1];
  for (int v = 0; v < g.n; ++v) g.offsets[v + 1] += g.offsets[v];
  g.targets.resize(arcs.size());
  g.weights.resize(arcs.size());
  g.gates.resize(arcs.size());
  for (size_t i = 0; i < arcs.size(); ++i) {
    g.targets[i] = arcs[i].to;
    g.weights[i] = arcs[i].w;
    g.gates[i] = arcs[i].gate;
  }
  return g;
}

namespace {

// Dijkstra with (distance, vertex) heap keys so ties settle lowest index first.
void dijkstra(const MetricGraph& g, int source, const std::vector<std::uint8_t>* mask,
              Eigen::VectorXd& dist, std::vector<int>* pred) {
  if (source < 0 || source >= g.n) {
    throw ValidationError("source vertex " + std::to_string(source) + " out of range");
  }
  if (mask && !(*mask)[static_cast<size_t>(source)]) {
    throw ValidationError("source vertex " + std::to_string(source) + " is outside the restriction");
  }
  dist.setConstant(g.n, kInf);
  if (pred) pred->assign(static_cast<size_t>(g.n), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      int to = g.targets[i];
      if (mask) {
        if (!(*mask)[static_cast<size_t>(to)]) continue;
        const auto& gate = g.gates[i];
        if (gate[0] >= 0 && (!(*mask)[static_cast<size_t>(gate[0])] ||
                             !(*mask)[static_cast<size_t>(gate[1])])) {
          continue;
        }
      }
      double nd = d + g.weights[i];
      if (nd < dist[to]) {
        dist[to] = nd;
        if (pred) (*pred)[static_cast<size_t>(to)] = v;
        heap.emplace(nd, to);
      }
    }
  }
}

}  // namespace

DistanceField geodesic_distances(const MetricGraph& g, int source) {
  DistanceField f;
  f.source = source;
  f.method = g.method;
  dijkstra(g, source, nullptr, f.d, nullptr);
  return f;
}

DistanceField geodesic_distances(const MetricGraph& g, int source,
                                 const std::vector<std::uint8_t>& mask) {
  if (static_cast<int>(mask.size()) != g.n) {
    throw ValidationError("restriction mask size does not match vertex count");
  }
  DistanceField f;
  f.source = source;
  f.method = g.method;
  dijkstra(g, source, &mask, f.d, nullptr);
  return f;
}

PathProfile shortest_path(const MetricGraph& g, int a, int b) {
  if (b < 0 || b >= g.n) {
    throw ValidationError("path endpoint " + std::to_string(b) + " out of range");
  }
  PathProfile p;
  if (a == b) {
    p.vertices = {a};
    p.t = {0.0};
    return p;
  }
  Eigen::VectorXd dist;
  std::vector<int> pred;
  dijkstra(g, a, nullptr, dist, &pred);
  if (!std::isfinite(dist[b])) {
    throw ValidationError("no path between " + std::to_string(a) + " and " + std::to_string(b));
  }
  for (int v = b; v != -1; v = pred[static_cast<size_t>(v)]) p.vertices.push_back(v);
  std::reverse(p.vertices.begin(), p.vertices.end());
  p.t.resize(p.vertices.size());
  for (size_t i = 0; i < p.vertices.size(); ++i) {
    p.t[i] = dist[p.vertices[i]];
  }
  p.length = dist[b];
  return p;
}

GeodesicPath geodesic_path(const TriSurface& surf, const MetricGraph& g, int a, int b,
                           double h) {
  if (!(h > 0.0) || h > g.mean_edge * (1.0 + 1e-12)) {
    throw ValidationError("resampling step must lie in (0, mean edge length]");
  }
  PathProfile base = shortest_path(g, a, b);
  GeodesicPath path;
  path.vertices = base.vertices;
  path.t = base.t;
  path.length = base.length;
  path.h = h;
  const int samples = static_cast<int>(std::floor(base.length / h + 1e-12)) + 1;
  path.s.resize(samples);
  path.positions.resize(samples, 3);
  size_t seg = 0;
  for (int j = 0; j < samples; ++j) {
    double sj = h * static_cast<double>(j);
    path.s[j] = sj;
    while (seg + 2 < base.t.size() && base.t[seg + 1] < sj) ++seg;
    if (base.vertices.size() == 1) {
      path.positions.row(j) = surf.V.row(base.vertices[0]);
      continue;
    }
    double t0 = base.t[seg], t1 = base.t[seg + 1];
    double w = t1 > t0 ? std::clamp((sj - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
    path.positions.row(j) = (1.0 - w) * surf.V.row(base.vertices[seg]) +
                            w * surf.V.row(base.vertices[seg + 1]);
  }
  return path;
}

Eigen::VectorXd sample_along(const GeodesicPath& path, const Eigen::VectorXd& f) {
  Eigen::VectorXd out(path.s.size());
  size_t seg = 0;
  for (Eigen::Index j = 0; j < path.s.size(); ++j) {
    double sj = path.s[j];
    if (path.vertices.size() == 1) {
      out[j] = f[path.vertices[0]];
      continue;
    }
    while (seg + 2 < path.t.size() && path.t[seg + 1] < sj) ++seg;
    double t0 = path.t[seg], t1 = path.t[seg + 1];
    double w = t1 > t0 ? std::clamp((sj - t0) / (t1 - t0), 0.0, 1.0) : 0.0;
    out[j] = (1.0 - w) * f[path.vertices[seg]] + w * f[path.vertices[seg + 1]];
  }
  return out;
}

EccentricityResult eccentricities(const MetricGraph& g) {
  EccentricityResult r;
  r.ecc.resize(g.n);
  parallel_for(g.n, [&](int v) {
    Eigen::VectorXd dist;
    dijkstra(g, v, nullptr, dist, nullptr);
    r.ecc[v] = dist.maxCoeff();
  });
  r.diameter = r.ecc.maxCoeff();
  r.radius = r.ecc.minCoeff();
  return r;
}

double vertex_excess(const MetricGraph& g, int p, int q) {
  DistanceField dp = geodesic_distances(g, p);
  DistanceField dq = geodesic_distances(g, q);
  return (dp.d + dq.d).maxCoeff() - dp.d[q];
}

}  // namespace pinchlab
