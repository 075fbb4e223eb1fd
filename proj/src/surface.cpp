#include "pinchlab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

namespace pinchlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_subdivisions(int subdivisions) {
  if (subdivisions < 0 || subdivisions > 8) {
    throw ValidationError("subdivisions must lie in [0, 8], got " +
                          std::to_string(subdivisions));
  }
}

// Base icosahedron with vertex 0 at the +z pole and vertex 11 at the -z pole.
TriSurface pole_aligned_icosahedron() {
  TriSurface s;
  s.V.resize(12, 3);
  const double h = 1.0 / std::sqrt(5.0);
  const double r = 2.0 / std::sqrt(5.0);
  s.V.row(0) << 0.0, 0.0, 1.0;
  for (int i = 0; i < 5; ++i) {
    double a = 2.0 * kPi * i / 5.0;
    s.V.row(1 + i) << r * std::cos(a), r * std::sin(a), h;
  }
  for (int i = 0; i < 5; ++i) {
    double a = 2.0 * kPi * i / 5.0 + kPi / 5.0;
    s.V.row(6 + i) << r * std::cos(a), r * std::sin(a), -h;
  }
  s.V.row(11) << 0.0, 0.0, -1.0;

  s.F.resize(20, 3);
  int f = 0;
  for (int i = 0; i < 5; ++i) {
    int j = (i + 1) % 5;
    s.F.row(f++) << 0, 1 + i, 1 + j;             // top cap
    s.F.row(f++) << 1 + i, 6 + i, 1 + j;         // upper band
    s.F.row(f++) << 1 + j, 6 + i, 6 + j;         // lower band
    s.F.row(f++) << 11, 6 + j, 6 + i;            // bottom cap
  }

  // Orient outward: flip everything if the signed volume comes out negative.
  double vol6 = 0.0;
  for (int k = 0; k < s.F.rows(); ++k) {
    Eigen::Vector3d a = s.V.row(s.F(k, 0));
    Eigen::Vector3d b = s.V.row(s.F(k, 1));
    Eigen::Vector3d c = s.V.row(s.F(k, 2));
    vol6 += a.dot(b.cross(c));
  }
  if (vol6 < 0) s.F.col(1).swap(s.F.col(2));
  return s;
}

TriSurface subdivide_on_sphere(const TriSurface& base, int rounds) {
  TriSurface cur = base;
  for (int round = 0; round < rounds; ++round) {
    std::map<std::pair<int, int>, int> midpoint;
    std::vector<Eigen::Vector3d> verts;
    verts.reserve(static_cast<size_t>(cur.V.rows()) * 4);
    for (int i = 0; i < cur.V.rows(); ++i) verts.push_back(cur.V.row(i));

    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Eigen::Vector3d m = (verts[a] + verts[b]).normalized();
      int idx = static_cast<int>(verts.size());
      verts.push_back(m);
      midpoint.emplace(key, idx);
      return idx;
    };

    Eigen::MatrixX3i faces(cur.F.rows() * 4, 3);
    int f = 0;
    for (int k = 0; k < cur.F.rows(); ++k) {
      int a = cur.F(k, 0), b = cur.F(k, 1), c = cur.F(k, 2);
      int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      faces.row(f++) << a, ab, ca;
      faces.row(f++) << ab, b, bc;
      faces.row(f++) << ca, bc, c;
      faces.row(f++) << ab, bc, ca;
    }
    cur.F = faces;
    cur.V.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) cur.V.row(static_cast<Eigen::Index>(i)) = verts[i];
  }
  return cur;
}

double corner_angle(const Eigen::Vector3d& at, const Eigen::Vector3d& p,
                    const Eigen::Vector3d& q) {
  Eigen::Vector3d u = p - at;
  Eigen::Vector3d v = q - at;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

}  // namespace

double DumbbellProfile::radius(double z) const {
  double g = -(z * z + z0 * z0) + std::sqrt(4.0 * z0 * z0 * z * z + b * b * b * b);
  return g > 0.0 ? std::sqrt(g) : 0.0;
}

double DumbbellProfile::gauss_curvature(double z) const {
  double b4 = b * b * b * b;
  double q = 4.0 * z0 * z0 * z * z + b4;
  double g = -(z * z + z0 * z0) + std::sqrt(q);
  if (g <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
  double g1 = -2.0 * z + 4.0 * z0 * z0 * z / std::sqrt(q);
  double g2 = -2.0 + 4.0 * z0 * z0 * b4 / (q * std::sqrt(q));
  double r = std::sqrt(g);
  double r1 = g1 / (2.0 * r);
  double r2 = (2.0 * g * g2 - g1 * g1) / (4.0 * g * r);
  double w = 1.0 + r1 * r1;
  return -r2 / (r * w * w);
}

DumbbellProfile dumbbell_profile(double neck) {
  if (!(neck > 0.0 && neck < 1.0)) {
    throw ValidationError("neck radius must lie in (0, 1), got " +
                          std::to_string(neck));
  }
  DumbbellProfile p;
  p.neck = neck;
  p.scale = kDumbbellScale;
  p.b = p.scale;
  p.z0 = p.scale * std::sqrt(1.0 - neck * neck);
  p.z_end = std::sqrt(p.z0 * p.z0 + p.b * p.b);
  return p;
}

TriSurface icosphere(int subdivisions) {
  check_subdivisions(subdivisions);
  return subdivide_on_sphere(pole_aligned_icosahedron(), subdivisions);
}

TriSurface spheroid(double ratio, int subdivisions) {
  if (!(ratio >= 0.2 && ratio <= 5.0)) {
    throw ValidationError("spheroid ratio must lie in [0.2, 5], got " +
                          std::to_string(ratio));
  }
  TriSurface s = icosphere(subdivisions);
  s.V.col(2) *= ratio;
  return s;
}

TriSurface dumbbell(double neck, int subdivisions) {
  DumbbellProfile prof = dumbbell_profile(neck);
  check_subdivisions(subdivisions);
  TriSurface s = icosphere(subdivisions);
  for (int i = 0; i < s.V.rows(); ++i) {
    double x = s.V(i, 0), y = s.V(i, 1), z = s.V(i, 2);
    double axial = z * prof.z_end;
    double rxy = std::hypot(x, y);
    if (rxy < 1e-12) {
      s.V.row(i) << 0.0, 0.0, (z >= 0.0 ? prof.z_end : -prof.z_end);
    } else {
      double rr = prof.radius(axial) / rxy;
      s.V.row(i) << x * rr, y * rr, axial;
    }
  }
  validate_surface(s);
  return s;
}

void validate_surface(const TriSurface& s) {
  const Eigen::Index nv = s.V.rows();
  const Eigen::Index nf = s.F.rows();
  if (nv < 4 || nf < 4) throw ValidationError("mesh too small to be a closed surface");
  std::vector<char> used(static_cast<size_t>(nv), 0);
  for (Eigen::Index k = 0; k < nf; ++k) {
    for (int c = 0; c < 3; ++c) {
      int v = s.F(k, c);
      if (v < 0 || v >= nv) {
        throw ValidationError("face " + std::to_string(k) +
                              " references vertex " + std::to_string(v) +
                              " outside [0, " + std::to_string(nv) + ")");
      }
      used[static_cast<size_t>(v)] = 1;
    }
    if (s.F(k, 0) == s.F(k, 1) || s.F(k, 1) == s.F(k, 2) || s.F(k, 0) == s.F(k, 2)) {
      throw ValidationError("face " + std::to_string(k) + " repeats a vertex");
    }
  }
  for (Eigen::Index v = 0; v < nv; ++v) {
    if (!used[static_cast<size_t>(v)]) {
      throw ValidationError("vertex " + std::to_string(v) + " belongs to no face");
    }
  }

  // Closed oriented manifold: every directed edge appears exactly once and its
  // reverse exactly once.
  std::map<std::pair<int, int>, int> directed;
  for (Eigen::Index k = 0; k < nf; ++k) {
    for (int c = 0; c < 3; ++c) {
      int a = s.F(k, c), b = s.F(k, (c + 1) % 3);
      if (++directed[{a, b}] > 1) {
        throw ValidationError("directed edge (" + std::to_string(a) + ", " +
                              std::to_string(b) + ") appears twice; mesh is not an oriented manifold");
      }
    }
  }
  for (const auto& [e, cnt] : directed) {
    if (directed.find({e.second, e.first}) == directed.end()) {
      throw ValidationError("edge (" + std::to_string(e.first) + ", " +
                            std::to_string(e.second) + ") has no opposite; mesh has boundary");
    }
  }

  Eigen::VectorXd areas = face_areas(s);
  double amax = areas.maxCoeff();
  for (Eigen::Index k = 0; k < nf; ++k) {
    if (!(areas[k] > 1e-12 * amax)) {
      throw ValidationError("face " + std::to_string(k) + " is degenerate (area " +
                            std::to_string(areas[k]) + ")");
    }
  }

  // Connectivity via vertex adjacency.
  std::vector<std::vector<int>> adj(static_cast<size_t>(nv));
  for (Eigen::Index k = 0; k < nf; ++k) {
    for (int c = 0; c < 3; ++c) {
      adj[static_cast<size_t>(s.F(k, c))].push_back(s.F(k, (c + 1) % 3));
    }
  }
  std::vector<char> seen(static_cast<size_t>(nv), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  size_t reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  if (reached != static_cast<size_t>(nv)) {
    throw ValidationError("mesh is disconnected (" + std::to_string(reached) + " of " +
                          std::to_string(nv) + " vertices reachable)");
  }
}

Eigen::VectorXd face_areas(const TriSurface& s) {
  Eigen::VectorXd a(s.F.rows());
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    Eigen::Vector3d p = s.V.row(s.F(k, 0));
    Eigen::Vector3d q = s.V.row(s.F(k, 1));
    Eigen::Vector3d r = s.V.row(s.F(k, 2));
    a[k] = 0.5 * (q - p).cross(r - p).norm();
  }
  return a;
}

double total_area(const TriSurface& s) { return face_areas(s).sum(); }

Eigen::VectorXd vertex_areas(const TriSurface& s) {
  Eigen::VectorXd fa = face_areas(s);
  Eigen::VectorXd va = Eigen::VectorXd::Zero(s.V.rows());
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    for (int c = 0; c < 3; ++c) va[s.F(k, c)] += fa[k] / 3.0;
  }
  return va;
}

Eigen::VectorXd angle_defect_curvature(const TriSurface& s) {
  Eigen::VectorXd defect = Eigen::VectorXd::Constant(s.V.rows(), 2.0 * kPi);
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    Eigen::Vector3d a = s.V.row(s.F(k, 0));
    Eigen::Vector3d b = s.V.row(s.F(k, 1));
    Eigen::Vector3d c = s.V.row(s.F(k, 2));
    defect[s.F(k, 0)] -= corner_angle(a, b, c);
    defect[s.F(k, 1)] -= corner_angle(b, c, a);
    defect[s.F(k, 2)] -= corner_angle(c, a, b);
  }
  return defect.cwiseQuotient(vertex_areas(s));
}

namespace {
template <class Fn>
void for_each_edge(const TriSurface& s, Fn&& fn) {
  std::map<std::pair<int, int>, char> seen;
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    for (int c = 0; c < 3; ++c) {
      int a = s.F(k, c), b = s.F(k, (c + 1) % 3);
      auto key = std::minmax(a, b);
      if (seen.emplace(key, 1).second) fn(key.first, key.second);
    }
  }
}
}  // namespace

double mean_edge_length(const TriSurface& s) {
  double sum = 0.0;
  long count = 0;
  for_each_edge(s, [&](int a, int b) {
    sum += (s.V.row(a) - s.V.row(b)).norm();
    ++count;
  });
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double max_edge_length(const TriSurface& s) {
  double m = 0.0;
  for_each_edge(s, [&](int a, int b) {
    m = std::max(m, (s.V.row(a) - s.V.row(b)).norm());
  });
  return m;
}

RescaleResult rescale_min_curvature_to_one(const TriSurface& s) {
  RescaleResult out;
  out.min_curvature = angle_defect_curvature(s).minCoeff();
  if (!(out.min_curvature > 0.0)) {
    throw HypothesisViolation("minimum discrete curvature is " +
                              std::to_string(out.min_curvature) +
                              "; cannot rescale to a positive curvature floor");
  }
  out.scale = std::sqrt(out.min_curvature);
  out.surface = s;
  out.surface.V *= out.scale;
  return out;
}

namespace {

struct LineReader {
  std::istream& in;
  const std::string& name;
  int line = 0;

  // Next non-empty, non-comment line split into tokens.
  bool next(std::vector<std::string>& tokens) {
    std::string text;
    while (std::getline(in, text)) {
      ++line;
      auto hash = text.find('#');
      if (hash != std::string::npos) text.erase(hash);
      std::istringstream ss(text);
      tokens.assign(std::istream_iterator<std::string>(ss),
                    std::istream_iterator<std::string>());
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError(name + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const LineReader& r, const std::string& tok) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    r.fail("expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) r.fail("trailing characters in number '" + tok + "'");
  return v;
}

long parse_long(const LineReader& r, const std::string& tok) {
  size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    r.fail("expected an integer, got '" + tok + "'");
  }
  if (pos != tok.size()) r.fail("trailing characters in integer '" + tok + "'");
  return v;
}

}  // namespace

TriSurface read_off(std::istream& in, const std::string& name) {
  LineReader r{in, name};
  std::vector<std::string> tok;
  if (!r.next(tok)) r.fail("empty file, expected OFF header");
  if (tok.size() != 1 || tok[0] != "OFF") r.fail("expected OFF header");
  if (!r.next(tok)) r.fail("expected vertex/face counts");
  if (tok.size() < 2) r.fail("expected 'V F 0' counts line");
  long nv = parse_long(r, tok[0]);
  long nf = parse_long(r, tok[1]);
  if (nv <= 0 || nf <= 0) r.fail("vertex and face counts must be positive");

  TriSurface s;
  s.V.resize(nv, 3);
  for (long i = 0; i < nv; ++i) {
    if (!r.next(tok)) r.fail("unexpected end of file in vertex list");
    if (tok.size() < 3) r.fail("vertex line needs 3 coordinates");
    for (int c = 0; c < 3; ++c) s.V(i, c) = parse_double(r, tok[c]);
  }
  s.F.resize(nf, 3);
  for (long k = 0; k < nf; ++k) {
    if (!r.next(tok)) r.fail("unexpected end of file in face list");
    if (tok.size() < 4) r.fail("face line needs '3 i j k'");
    if (parse_long(r, tok[0]) != 3) r.fail("only triangle faces are supported");
    for (int c = 0; c < 3; ++c) {
      long idx = parse_long(r, tok[c + 1]);
      if (idx < 0 || idx >= nv) {
        r.fail("vertex index " + std::to_string(idx) + " out of range [0, " +
               std::to_string(nv) + ")");
      }
      s.F(k, c) = static_cast<int>(idx);
    }
  }
  validate_surface(s);
  return s;
}

TriSurface read_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_off(in, path);
}

void write_off(const TriSurface& s, std::ostream& out) {
  out << "OFF\n" << s.V.rows() << " " << s.F.rows() << " 0\n";
  char buf[96];
  for (Eigen::Index i = 0; i < s.V.rows(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", s.V(i, 0), s.V(i, 1), s.V(i, 2));
    out << buf;
  }
  for (Eigen::Index k = 0; k < s.F.rows(); ++k) {
    out << "3 " << s.F(k, 0) << " " << s.F(k, 1) << " " << s.F(k, 2) << "\n";
  }
}

void write_off_file(const TriSurface& s, const std::string& path) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write '" + tmp.string() + "'");
    write_off(s, out);
    if (!out) throw ValidationError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace pinchlab
