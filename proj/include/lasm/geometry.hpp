#pragma once

#include "lasm/lattice.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace lasm {

/// Half-space {x : normal . x <= offset} with unit normal, plus the indices of its vertices.
/// In d = 3 the vertices are listed counter-clockwise seen from outside; in d = 2 a facet is an edge.
struct Facet {
  VectorXd normal;
  double offset = 0.0;
  std::vector<int> vertices;
};

struct Polytope {
  int dim = 0;
  std::vector<VectorXd> vertices;
  std::vector<Facet> facets;
  bool degenerate = false;    // input did not span R^d

  double support(const VectorXd& u) const;
  bool contains(const VectorXd& x, double tol = 1e-10) const;
  /// Euclidean distance from x to the polytope (0 inside). Requires facets, d <= 3.
  double distance(const VectorXd& x) const;
  /// Radial function max{r : r u in P}; requires 0 in the interior.
  double radial(const VectorXd& u) const;
};

/// Extreme points and merged facets. d = 1 and 2 exactly, d = 3 incremental, d > 3 by facet
/// enumeration over d-subsets (small inputs only).
/// Degenerate inputs return their extreme points with `degenerate` set and no facets.
Polytope convex_hull(const std::vector<VectorXd>& points, double eps = 1e-12);

/// {s : s^T A s <= 1} with A symmetric positive definite.
struct Ellipsoid {
  MatrixXd a;

  double radial(const VectorXd& u) const { return 1.0 / std::sqrt(u.dot(a * u)); }
  double support(const VectorXd& u) const;
};

Ellipsoid make_ellipsoid(const MatrixXd& a);

/// Star-shaped body sampled along unit directions; normals are optional outward normals
/// at the boundary points radius[k] * dirs[k].
struct StarBody {
  std::vector<VectorXd> dirs;
  std::vector<double> radius;
  std::vector<VectorXd> normals;

  std::vector<VectorXd> boundary() const;
  /// Support function of the convex hull of the boundary samples.
  double support(const VectorXd& u) const;
};

StarBody sample_star(const Polytope& p, const std::vector<VectorXd>& dirs);
StarBody sample_star(const Ellipsoid& e, const std::vector<VectorXd>& dirs);

/// Dual of a polytope with 0 in its interior: facet (n, b) becomes the vertex n / b.
Polytope polar_dual(const Polytope& p);
/// A -> A^{-1}.
Ellipsoid polar_dual(const Ellipsoid& e);
/// Sample k maps to direction n_k, radius 1 / (n_k . x_k), normal dirs[k]. Requires normals.
StarBody polar_dual(const StarBody& s);

/// Vertices of {x : n_k . x <= b_k} by enumerating d-subsets (bounded polyhedra, small inputs).
std::vector<VectorXd> vertices_from_halfspaces(const std::vector<VectorXd>& normals,
                                               const std::vector<double>& offsets,
                                               double eps = 1e-10);

/// Hausdorff distance between finite point sets (early-break all-pairs scan).
double hausdorff(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b);

/// Hausdorff distance between the convex hulls of two point sets, via support functions
/// sampled at `dirs`.
double hausdorff_convex(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b,
                        const std::vector<VectorXd>& dirs);

/// Hausdorff distance between a polytope (d <= 3) and a point set. The polytope side is
/// sampled on a lattice of spacing `spacing`; the point side is exact.
double hausdorff_polytope_points(const Polytope& p, const std::vector<VectorXd>& pts, double spacing);

/// max_k |r_k^A - r_k^B| on a shared direction grid.
double spherical_gap(const StarBody& a, const StarBody& b);

/// Equally spaced circle (d = 2), Fibonacci sphere (d = 3), {+1, -1} (d = 1), or seeded
/// random unit vectors (d >= 4).
std::vector<VectorXd> direction_grid(int dim, int count, unsigned long long seed = 1);

struct SvgLayer {
  std::string name;
  std::string color;
  std::vector<VectorXd> points;
  bool closed = true;     // polyline closed into a loop
  bool scatter = false;   // draw points as dots instead
};

/// Overlays d = 2 layers on one canvas.
void write_svg(const std::string& path, const std::vector<SvgLayer>& layers, int pixels = 800);

/// "x_1..x_d" vertex rows.
void write_vertices_csv(std::ostream& out, const std::vector<VectorXd>& vertices);

}  // namespace lasm
