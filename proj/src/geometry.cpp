#include "lasm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

namespace lasm {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

double cross2(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Indices of the counter-clockwise hull of 2-D points, collinear points removed.
std::vector<int> hull2(const std::vector<Vector2d>& pts, double eps) {
  std::vector<int> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 3) return idx;
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    int i = idx[t];
    while (k >= lower && cross2(pts[h[k - 2]], pts[h[k - 1]], pts[i]) <= eps) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  return h;
}

double segment_distance(const VectorXd& x, const VectorXd& a, const VectorXd& b) {
  VectorXd ab = b - a;
  double len2 = ab.squaredNorm();
  double s = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + s * ab)).norm();
}

std::vector<VectorXd> dedupe(const std::vector<VectorXd>& pts, double tol) {
  std::vector<VectorXd> s = pts;
  std::sort(s.begin(), s.end(), [](const VectorXd& a, const VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<VectorXd> out;
  for (auto& p : s)
    if (out.empty() || (p - out.back()).lpNorm<Eigen::Infinity>() > tol) out.push_back(std::move(p));
  return out;
}

Facet facet_from(const VectorXd& normal, double offset, std::vector<int> verts) {
  Facet f;
  f.normal = normal;
  f.offset = offset;
  f.vertices = std::move(verts);
  return f;
}

Polytope hull_1d(const std::vector<VectorXd>& pts) {
  Polytope p;
  p.dim = 1;
  auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const VectorXd& a, const VectorXd& b) { return a[0] < b[0]; });
  p.vertices.push_back(*lo);
  if ((*hi)[0] > (*lo)[0]) {
    p.vertices.push_back(*hi);
    p.facets.push_back(facet_from(VectorXd::Constant(1, -1.0), -(*lo)[0], {0}));
    p.facets.push_back(facet_from(VectorXd::Constant(1, 1.0), (*hi)[0], {1}));
  } else {
    p.degenerate = true;
  }
  return p;
}

// Extreme points of a lower-dimensional point set through its affine hull.
Polytope degenerate_hull(const std::vector<VectorXd>& pts, int rank, const VectorXd& centre,
                         const MatrixXd& basis, double eps) {
  Polytope p;
  p.dim = static_cast<int>(centre.size());
  p.degenerate = true;
  if (rank == 0) {
    p.vertices.push_back(pts.front());
    return p;
  }
  if (rank == 1) {
    auto key = [&](const VectorXd& x) { return (x - centre).dot(basis.col(0)); };
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [&](const VectorXd& a, const VectorXd& b) { return key(a) < key(b); });
    p.vertices = {*lo, *hi};
    return p;
  }
  std::vector<Vector2d> flat;
  for (const auto& x : pts) flat.emplace_back((x - centre).dot(basis.col(0)), (x - centre).dot(basis.col(1)));
  for (int i : hull2(flat, eps)) p.vertices.push_back(pts[i]);
  return p;
}

Polytope hull_2d(const std::vector<VectorXd>& pts, double eps) {
  std::vector<Vector2d> flat;
  for (const auto& x : pts) flat.emplace_back(x[0], x[1]);
  std::vector<int> h = hull2(flat, eps);
  Polytope p;
  p.dim = 2;
  for (int i : h) p.vertices.push_back(pts[i]);
  const int n = static_cast<int>(p.vertices.size());
  for (int k = 0; k < n; ++k) {
    const VectorXd& a = p.vertices[k];
    const VectorXd& b = p.vertices[(k + 1) % n];
    VectorXd normal(2);
    normal << b[1] - a[1], a[0] - b[0];
    normal.normalize();
    p.facets.push_back(facet_from(normal, normal.dot(a), {k, (k + 1) % n}));
  }
  return p;
}

Polytope hull_3d(const std::vector<VectorXd>& in, double eps, double scale) {
  std::vector<Vector3d> pts;
  for (const auto& x : in) pts.emplace_back(x[0], x[1], x[2]);
  const double tol = eps * std::max(1.0, scale);
  const int n = static_cast<int>(pts.size());

  // Initial tetrahedron from extreme choices.
  int i0 = 0, i1 = 0, i2 = -1, i3 = -1;
  for (int i = 0; i < n; ++i)
    if ((pts[i] - pts[i0]).norm() > (pts[i1] - pts[i0]).norm()) i1 = i;
  double best = 0;
  for (int i = 0; i < n; ++i) {
    double a = (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm();
    if (a > best) best = a, i2 = i;
  }
  best = 0;
  Vector3d nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    double h = std::abs(nrm.dot(pts[i] - pts[i0]));
    if (h > best) best = h, i3 = i;
  }

  struct Tri {
    int v[3];
    Vector3d n;
    double off;
    bool alive = true;
  };
  std::vector<Tri> faces;
  const Vector3d inside = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  auto add_face = [&](int a, int b, int c) {
    Tri t{{a, b, c}, (pts[b] - pts[a]).cross(pts[c] - pts[a]).normalized(), 0.0};
    t.off = t.n.dot(pts[a]);
    if (t.n.dot(inside) > t.off) {
      std::swap(t.v[1], t.v[2]);
      t.n = -t.n;
      t.off = -t.off;
    }
    faces.push_back(t);
  };
  add_face(i0, i1, i2);
  add_face(i0, i1, i3);
  add_face(i0, i2, i3);
  add_face(i1, i2, i3);

  for (int p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    std::vector<int> visible;
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
      if (faces[f].alive && faces[f].n.dot(pts[p]) - faces[f].off > tol) visible.push_back(f);
    if (visible.empty()) continue;
    std::set<std::pair<int, int>> edges;
    for (int f : visible)
      for (int e = 0; e < 3; ++e) edges.insert({faces[f].v[e], faces[f].v[(e + 1) % 3]});
    for (int f : visible) faces[f].alive = false;
    for (const auto& [a, b] : edges) {
      if (edges.count({b, a})) continue;
      Tri t{{a, b, p}, (pts[b] - pts[a]).cross(pts[p] - pts[a]), 0.0};
      if (t.n.norm() == 0.0) continue;
      t.n.normalize();
      t.off = t.n.dot(pts[a]);
      if (t.n.dot(inside) > t.off) {
        std::swap(t.v[0], t.v[1]);
        t.n = -t.n;
        t.off = -t.off;
      }
      faces.push_back(t);
    }
  }

  // Merge coplanar triangles into facets, keeping each facet's extreme points in order.
  std::vector<Tri> live;
  for (const auto& f : faces)
    if (f.alive) live.push_back(f);
  std::vector<int> group(live.size(), -1);
  std::vector<std::vector<int>> groups;
  for (std::size_t a = 0; a < live.size(); ++a) {
    if (group[a] >= 0) continue;
    group[a] = static_cast<int>(groups.size());
    groups.push_back({static_cast<int>(a)});
    for (std::size_t b = a + 1; b < live.size(); ++b)
      if (group[b] < 0 && live[a].n.dot(live[b].n) > 1 - 1e-9 && std::abs(live[a].off - live[b].off) <= 1e3 * tol) {
        group[b] = group[a];
        groups.back().push_back(static_cast<int>(b));
      }
  }

  Polytope poly;
  poly.dim = 3;
  std::map<int, int> remap;
  for (const auto& g : groups) {
    std::set<int> vs;
    Vector3d normal = Vector3d::Zero();
    for (int t : g) {
      for (int k = 0; k < 3; ++k) vs.insert(live[t].v[k]);
      normal += live[t].n;
    }
    normal.normalize();
    Vector3d e1 = (std::abs(normal.x()) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY()).cross(normal).normalized();
    Vector3d e2 = normal.cross(e1);
    std::vector<int> ids(vs.begin(), vs.end());
    std::vector<Vector2d> flat;
    for (int id : ids) flat.emplace_back(pts[id].dot(e1), pts[id].dot(e2));
    double offset = 0;
    for (int id : ids) offset += normal.dot(pts[id]);
    offset /= static_cast<double>(ids.size());
    Facet f;
    f.normal = normal;
    f.offset = offset;
    for (int k : hull2(flat, tol * tol)) {
      int id = ids[k];
      auto it = remap.find(id);
      if (it == remap.end()) {
        it = remap.emplace(id, static_cast<int>(poly.vertices.size())).first;
        poly.vertices.push_back(in[id]);
      }
      f.vertices.push_back(it->second);
    }
    poly.facets.push_back(std::move(f));
  }
  return poly;
}

// Brute-force facet enumeration for d >= 4.
Polytope hull_nd(const std::vector<VectorXd>& pts, int d, double tol) {
  const std::size_t n = pts.size();
  double combos = 1;
  for (int k = 0; k < d; ++k) combos *= static_cast<double>(n - k) / (k + 1);
  if (combos > 5e6) throw ValidationError("convex_hull: input too large for d >= 4");
  Polytope poly;
  poly.dim = d;
  std::vector<std::size_t> pick(d);
  std::iota(pick.begin(), pick.end(), 0);
  std::set<int> used;
  while (true) {
    MatrixXd m(d - 1, d);
    for (int k = 1; k < d; ++k) m.row(k - 1) = (pts[pick[k]] - pts[pick[0]]).transpose();
    Eigen::FullPivLU<MatrixXd> lu(m);
    if (lu.rank() == d - 1) {
      VectorXd normal = lu.kernel().col(0).normalized();
      double off = normal.dot(pts[pick[0]]);
      bool pos = false, neg = false;
      for (const auto& x : pts) {
        double s = normal.dot(x) - off;
        if (s > tol) pos = true;
        if (s < -tol) neg = true;
      }
      if (!(pos && neg)) {
        if (pos) {
          normal = -normal;
          off = -off;
        }
        bool dup = false;
        for (const auto& f : poly.facets)
          if (f.normal.dot(normal) > 1 - 1e-9 && std::abs(f.offset - off) <= tol) dup = true;
        if (!dup) {
          Facet f;
          f.normal = normal;
          f.offset = off;
          for (std::size_t k = 0; k < n; ++k)
            if (std::abs(normal.dot(pts[k]) - off) <= tol) f.vertices.push_back(static_cast<int>(k));
          poly.facets.push_back(std::move(f));
        }
      }
    }
    int k = d;
    while (k > 0 && pick[k - 1] == n - d + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (int j = k; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  // A point is a vertex when the normals of its facets span R^d.
  std::map<int, int> remap;
  for (std::size_t k = 0; k < n; ++k) {
    MatrixXd normals(0, d);
    for (const auto& f : poly.facets)
      if (std::find(f.vertices.begin(), f.vertices.end(), static_cast<int>(k)) != f.vertices.end()) {
        normals.conservativeResize(normals.rows() + 1, d);
        normals.row(normals.rows() - 1) = f.normal.transpose();
      }
    if (normals.rows() >= d && Eigen::FullPivLU<MatrixXd>(normals).rank() == d) {
      remap[static_cast<int>(k)] = static_cast<int>(poly.vertices.size());
      poly.vertices.push_back(pts[k]);
    }
  }
  for (auto& f : poly.facets) {
    std::vector<int> vs;
    for (int v : f.vertices)
      if (remap.count(v)) vs.push_back(remap[v]);
    f.vertices = std::move(vs);
  }
  return poly;
}

}  // namespace

double Polytope::support(const VectorXd& u) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) best = std::max(best, v.dot(u));
  return best;
}

bool Polytope::contains(const VectorXd& x, double tol) const {
  for (const auto& f : facets)
    if (f.normal.dot(x) > f.offset + tol) return false;
  return !facets.empty();
}

double Polytope::distance(const VectorXd& x) const {
  if (facets.empty()) throw ValidationError("distance needs a full-dimensional polytope");
  if (contains(x, 0.0)) return 0.0;
  if (dim == 1) return std::max(vertices.front()[0] - x[0], x[0] - vertices.back()[0]);
  double best = std::numeric_limits<double>::infinity();
  if (dim == 2) {
    for (const auto& f : facets) best = std::min(best, segment_distance(x, vertices[f.vertices[0]], vertices[f.vertices[1]]));
    return best;
  }
  if (dim != 3) throw ValidationError("distance supports d <= 3");
  for (const auto& f : facets) {
    const Vector3d n = f.normal.head<3>();
    const Vector3d px = x.head<3>();
    const Vector3d y = px - (n.dot(px) - f.offset) * n;
    bool inside = true;
    const int m = static_cast<int>(f.vertices.size());
    for (int k = 0; k < m && inside; ++k) {
      Vector3d a = vertices[f.vertices[k]].head<3>(), b = vertices[f.vertices[(k + 1) % m]].head<3>();
      if (n.dot((b - a).cross(y - a)) < -1e-12) inside = false;
    }
    if (inside && m >= 3) {
      best = std::min(best, std::abs(n.dot(px) - f.offset));
      continue;
    }
    for (int k = 0; k < m; ++k)
      best = std::min(best, segment_distance(x, vertices[f.vertices[k]], vertices[f.vertices[(k + 1) % m]]));
  }
  return best;
}

double Polytope::radial(const VectorXd& u) const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& f : facets) {
    double s = f.normal.dot(u);
    if (s > 0) r = std::min(r, f.offset / s);
  }
  return r;
}

Polytope convex_hull(const std::vector<VectorXd>& points, double eps) {
  if (points.empty()) throw ValidationError("convex_hull: empty input");
  const int d = static_cast<int>(points.front().size());
  double scale = 0;
  for (const auto& p : points) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  auto pts = dedupe(points, eps * std::max(1.0, scale));
  if (d == 1) return hull_1d(pts);

  VectorXd centre = VectorXd::Zero(d);
  for (const auto& p : pts) centre += p;
  centre /= static_cast<double>(pts.size());
  MatrixXd m(static_cast<Eigen::Index>(pts.size()), d);
  for (std::size_t k = 0; k < pts.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = (pts[k] - centre).transpose();
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinV);
  const double tol = eps * std::max(1.0, scale) * std::sqrt(static_cast<double>(pts.size()));
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > tol) ++rank;
  if (rank < d) {
    if (rank > 2) throw ValidationError("convex_hull: degenerate input of rank > 2 unsupported");
    return degenerate_hull(pts, rank, centre, svd.matrixV(), eps * std::max(1.0, scale * scale));
  }
  if (d == 2) return hull_2d(pts, eps * std::max(1.0, scale * scale));
  if (d == 3) return hull_3d(pts, eps, scale);
  return hull_nd(pts, d, 1e3 * eps * std::max(1.0, scale));
}

double Ellipsoid::support(const VectorXd& u) const { return std::sqrt(u.dot(a.ldlt().solve(u))); }

Ellipsoid make_ellipsoid(const MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("ellipsoid matrix must be square");
  if ((a - a.transpose()).norm() > 1e-10 * std::max(1.0, a.norm()))
    throw ValidationError("ellipsoid matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (!(es.eigenvalues().minCoeff() > 0)) throw ValidationError("ellipsoid matrix must be positive definite");
  return Ellipsoid{0.5 * (a + a.transpose())};
}

std::vector<VectorXd> StarBody::boundary() const {
  std::vector<VectorXd> out;
  out.reserve(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) out.push_back(radius[k] * dirs[k]);
  return out;
}

double StarBody::support(const VectorXd& u) const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < dirs.size(); ++k) best = std::max(best, radius[k] * dirs[k].dot(u));
  return best;
}

StarBody sample_star(const Polytope& p, const std::vector<VectorXd>& dirs) {
  StarBody s;
  s.dirs = dirs;
  for (const auto& u : dirs) {
    double r = std::numeric_limits<double>::infinity();
    const Facet* active = nullptr;
    for (const auto& f : p.facets) {
      double c = f.normal.dot(u);
      if (c > 0 && f.offset / c < r) {
        r = f.offset / c;
        active = &f;
      }
    }
    if (!active) throw ValidationError("sample_star: origin is not interior");
    s.radius.push_back(r);
    s.normals.push_back(active->normal);
  }
  return s;
}

StarBody sample_star(const Ellipsoid& e, const std::vector<VectorXd>& dirs) {
  StarBody s;
  s.dirs = dirs;
  for (const auto& u : dirs) {
    double r = e.radial(u);
    s.radius.push_back(r);
    s.normals.push_back((e.a * (r * u)).normalized());
  }
  return s;
}

Polytope polar_dual(const Polytope& p) {
  if (p.facets.empty()) throw ValidationError("polar_dual: polytope must be full-dimensional");
  std::vector<VectorXd> dual;
  for (const auto& f : p.facets) {
    if (!(f.offset > 1e-12)) throw ValidationError("polar_dual: 0 is not an interior point");
    dual.push_back(f.normal / f.offset);
  }
  return convex_hull(dual);
}

Ellipsoid polar_dual(const Ellipsoid& e) {
  MatrixXd inv = e.a.inverse();
  return Ellipsoid{0.5 * (inv + inv.transpose())};
}

StarBody polar_dual(const StarBody& s) {
  if (s.normals.size() != s.dirs.size()) throw ValidationError("polar_dual: star body needs normals");
  StarBody out;
  for (std::size_t k = 0; k < s.dirs.size(); ++k) {
    const VectorXd n = s.normals[k].normalized();
    const double h = n.dot(s.radius[k] * s.dirs[k]);
    if (!(h > 0)) throw ValidationError("polar_dual: 0 is not an interior point");
    out.dirs.push_back(n);
    out.radius.push_back(1.0 / h);
    out.normals.push_back(s.dirs[k]);
  }
  return out;
}

std::vector<VectorXd> vertices_from_halfspaces(const std::vector<VectorXd>& normals,
                                               const std::vector<double>& offsets, double eps) {
  const std::size_t m = normals.size();
  if (m == 0) return {};
  const int d = static_cast<int>(normals.front().size());
  if (static_cast<int>(m) < d) return {};
  std::vector<VectorXd> out;
  std::vector<std::size_t> pick(d);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    MatrixXd a(d, d);
    VectorXd b(d);
    for (int k = 0; k < d; ++k) {
      a.row(k) = normals[pick[k]].transpose();
      b[k] = offsets[pick[k]];
    }
    Eigen::FullPivLU<MatrixXd> lu(a);
    if (lu.rank() == d) {
      VectorXd x = lu.solve(b);
      bool ok = true;
      for (std::size_t k = 0; k < m && ok; ++k) ok = normals[k].dot(x) <= offsets[k] + eps;
      if (ok) out.push_back(x);
    }
    int k = d;
    while (k > 0 && pick[k - 1] == m - d + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (int j = k; j < d; ++j) pick[j] = pick[j - 1] + 1;
  }
  return dedupe(out, eps);
}

double hausdorff(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b) {
  if (a.empty() || b.empty()) throw ValidationError("hausdorff: empty input");
  auto directed = [](const std::vector<VectorXd>& x, const std::vector<VectorXd>& y) {
    std::vector<std::size_t> ox(x.size()), oy(y.size());
    std::iota(ox.begin(), ox.end(), 0);
    std::iota(oy.begin(), oy.end(), 0);
    std::mt19937_64 rng(7);
    std::shuffle(ox.begin(), ox.end(), rng);
    std::shuffle(oy.begin(), oy.end(), rng);
    double cmax = 0.0;
    for (std::size_t i : ox) {
      double cmin = std::numeric_limits<double>::infinity();
      for (std::size_t j : oy) {
        double dd = (x[i] - y[j]).squaredNorm();
        if (dd < cmin) cmin = dd;
        if (cmin <= cmax) break;
      }
      cmax = std::max(cmax, cmin);
    }
    return std::sqrt(cmax);
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff_convex(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b,
                        const std::vector<VectorXd>& dirs) {
  if (a.empty() || b.empty()) throw ValidationError("hausdorff_convex: empty input");
  double worst = 0.0;
  for (const auto& u : dirs) {
    double ha = -std::numeric_limits<double>::infinity(), hb = ha;
    for (const auto& x : a) ha = std::max(ha, x.dot(u));
    for (const auto& x : b) hb = std::max(hb, x.dot(u));
    worst = std::max(worst, std::abs(ha - hb));
  }
  return worst;
}

double hausdorff_polytope_points(const Polytope& p, const std::vector<VectorXd>& pts, double spacing) {
  if (pts.empty()) throw ValidationError("hausdorff: empty input");
  const int d = p.dim;
  double worst = 0.0;
  for (const auto& x : pts) worst = std::max(worst, p.distance(x));

  // Hash the point set on a grid of cell size close to its mean spacing.
  VectorXd lo = p.vertices.front(), hi = lo;
  for (const auto& v : p.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  VectorXd plo = pts.front(), phi = plo;
  for (const auto& x : pts) {
    plo = plo.cwiseMin(x);
    phi = phi.cwiseMax(x);
  }
  double vol = 1;
  for (int a = 0; a < d; ++a) vol *= std::max(phi[a] - plo[a], spacing);
  const double cell = std::max(spacing, std::pow(vol / static_cast<double>(pts.size()), 1.0 / d));
  auto key_of = [&](const VectorXd& x) {
    Point k(d);
    for (int a = 0; a < d; ++a) k[a] = static_cast<int>(std::floor(x[a] / cell));
    return k;
  };
  std::unordered_map<Point, std::vector<int>, PointHash, PointEq> grid;
  for (std::size_t k = 0; k < pts.size(); ++k) grid[key_of(pts[k])].push_back(static_cast<int>(k));

  auto nearest = [&](const VectorXd& x) {
    const Point c = key_of(x);
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0;; ++ring) {
      // Points not yet scanned are at least (ring - 1) * cell away.
      if (ring > 0 && std::sqrt(best) <= (ring - 1) * cell) break;
      if (ring > 1 << 12) break;
      Point off = Point::Constant(d, -ring);
      while (true) {
        if (norm_inf(off) == ring) {
          auto it = grid.find(c + off);
          if (it != grid.end())
            for (int k : it->second) best = std::min(best, (pts[k] - x).squaredNorm());
        }
        int a = 0;
        for (; a < d; ++a) {
          if (++off[a] <= ring) break;
          off[a] = -ring;
        }
        if (a == d) break;
      }
    }
    return std::sqrt(best);
  };

  for (const auto& v : p.vertices) worst = std::max(worst, nearest(v));
  std::vector<int> steps(d);
  for (int a = 0; a < d; ++a) steps[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / spacing));
  std::vector<int> idx(d, 0);
  while (true) {
    VectorXd x(d);
    for (int a = 0; a < d; ++a) x[a] = std::min(hi[a], lo[a] + idx[a] * spacing);
    if (p.contains(x, 1e-12)) worst = std::max(worst, nearest(x));
    int a = 0;
    for (; a < d; ++a) {
      if (++idx[a] <= steps[a]) break;
      idx[a] = 0;
    }
    if (a == d) break;
  }
  return worst;
}

double spherical_gap(const StarBody& a, const StarBody& b) {
  if (a.dirs.size() != b.dirs.size()) throw ValidationError("spherical_gap: direction grids differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.dirs.size(); ++k) {
    if ((a.dirs[k] - b.dirs[k]).norm() > 1e-12) throw ValidationError("spherical_gap: direction grids differ");
    worst = std::max(worst, std::abs(a.radius[k] - b.radius[k]));
  }
  return worst;
}

std::vector<VectorXd> direction_grid(int dim, int count, unsigned long long seed) {
  std::vector<VectorXd> dirs;
  if (dim == 1) {
    dirs.push_back(VectorXd::Constant(1, 1.0));
    dirs.push_back(VectorXd::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double a = 2 * M_PI * k / count;
      dirs.push_back((VectorXd(2) << std::cos(a), std::sin(a)).finished());
    }
  } else if (dim == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden * k;
      dirs.push_back((VectorXd(3) << r * std::cos(phi), r * std::sin(phi), z).finished());
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    for (int k = 0; k < count; ++k) {
      VectorXd v(dim);
      for (int a = 0; a < dim; ++a) v[a] = g(rng);
      dirs.push_back(v.normalized());
    }
  }
  return dirs;
}

void write_svg(const std::string& path, const std::vector<SvgLayer>& layers, int pixels) {
  double ext = 1e-9;
  for (const auto& l : layers)
    for (const auto& p : l.points) ext = std::max(ext, p.head<2>().lpNorm<Eigen::Infinity>());
  ext *= 1.05;
  const double half = pixels / 2.0;
  auto px = [&](const VectorXd& p) {
    return std::make_pair(half + p[0] / ext * half, half - p[1] / ext * half);
  };
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
    << "\" viewBox=\"0 0 " << pixels << ' ' << pixels << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& l : layers) {
    f << "<g id=\"" << l.name << "\">\n";
    if (l.scatter) {
      for (const auto& p : l.points) {
        auto [x, y] = px(p);
        f << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"1.5\" fill=\"" << l.color << "\"/>\n";
      }
    } else {
      f << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << l.color << "\" points=\"";
      for (const auto& p : l.points) {
        auto [x, y] = px(p);
        f << x << ',' << y << ' ';
      }
      if (l.closed && !l.points.empty()) {
        auto [x, y] = px(l.points.front());
        f << x << ',' << y;
      }
      f << "\"/>\n";
    }
    f << "</g>\n";
  }
  f << "</svg>\n";
}

void write_vertices_csv(std::ostream& out, const std::vector<VectorXd>& vertices) {
  if (vertices.empty()) return;
  const auto d = vertices.front().size();
  for (Eigen::Index a = 1; a <= d; ++a) out << (a > 1 ? "," : "") << "x_" << a;
  out << '\n';
  char buf[64];
  for (const auto& v : vertices) {
    for (Eigen::Index a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", v[a]);
      out << (a > 0 ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace lasm
