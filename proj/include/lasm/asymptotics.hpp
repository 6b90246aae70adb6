#pragma once

#include "lasm/geometry.hpp"
#include "lasm/lattice.hpp"
#include "lasm/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iosfwd>
#include <limits>
#include <vector>

namespace lasm {

/// Radii r_k = 1 / h(u_k) of the limit shape along unit directions, with gamma_k = h(u_k)
/// and the maximizers t_k on the spectral boundary.
struct ShapeCurve {
  int dim = 0;
  std::vector<VectorXd> dirs;
  std::vector<double> radius;
  std::vector<double> gamma;
  std::vector<VectorXd> t;

  /// Star body with outward normals t_k / |t_k|.
  StarBody star() const;
  /// Boundary points r_k u_k, scaled.
  std::vector<VectorXd> boundary(double scale = 1.0) const;
};

/// Evaluates support_value along every direction on up to `threads` workers (0 = hardware).
ShapeCurve limit_shape(const JumpKernel& kernel, const std::vector<VectorXd>& dirs, int threads = 0);

/// "u_1..u_d,radius,gamma" rows.
void write_shape_csv(std::ostream& out, const ShapeCurve& curve);

/// Averaged displacement of one simple color cycle.
struct CyclePoint {
  VectorXd point;
  std::vector<int> colors;
  int length() const { return static_cast<int>(colors.size()); }
};

/// The distinct averaged cycle displacements; their convex hull is the large-leak limit.
std::vector<CyclePoint> cycle_points(const JumpKernel& kernel, std::size_t cap = 2'000'000);
std::vector<VectorXd> points_of(const std::vector<CyclePoint>& cps);

struct FirstPassage {
  int n = 0;
  std::vector<Site> sites;       // sorted; reachable from (0, color 0) in at most n steps
  std::vector<VectorXd> points;  // distinct positions of `sites` divided by n
};

/// Breadth-first closure of n steps over the support of the kernel.
/// Throws NumericalError past `site_cap` sites.
FirstPassage first_passage_set(const JumpKernel& kernel, int n, std::size_t site_cap = 50'000'000);

/// {s : 2 s^T sigma^{-1} s <= 1} with sigma the Hessian of rho at 0 of a leak-free kernel.
/// Throws ValidationError on killed kernels or a drift above 1e-8.
Ellipsoid zero_leak_ellipsoid(const JumpKernel& kernel);

/// Principal branch of w e^w = y, y >= -1/e. Halley iteration.
template <typename Scalar>
Scalar lambert_w(Scalar y) {
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  const Scalar inv_e = exp(Scalar(-1));
  if (!(y >= -inv_e)) {
    // Tolerate rounding right at the branch point.
    if (y >= -inv_e * (Scalar(1) + Scalar(4) * std::numeric_limits<Scalar>::epsilon())) return Scalar(-1);
    throw ValidationError("lambert_w: argument below -1/e");
  }
  if (y == Scalar(0)) return Scalar(0);
  Scalar w;
  if (y < Scalar(-0.25)) {
    w = Scalar(-1) + sqrt(Scalar(2) * (Scalar(1) + y / inv_e));
  } else if (y < Scalar(3)) {
    w = log(Scalar(1) + y) * Scalar(0.8);
  } else {
    const Scalar l = log(y);
    w = l - log(l);
  }
  for (int it = 0; it < 100; ++it) {
    const Scalar ew = exp(w);
    const Scalar f = w * ew - y;
    const Scalar wp1 = w + Scalar(1);
    if (wp1 == Scalar(0)) break;
    const Scalar step = f / (ew * wp1 - (w + Scalar(2)) * f / (Scalar(2) * wp1));
    w -= step;
    if (abs(step) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + abs(w))) break;
  }
  return w;
}

/// (log N) / gamma - ((d - 1) / (2 gamma)) log log N + c0. Requires N > e and gamma > 0.
double predicted_radius(double gamma, int dim, double n, double c0);

/// Least-squares c0 for predicted_radius against measured radii.
double fit_c0(double gamma, int dim, const std::vector<double>& ns, const std::vector<double>& radii);

}  // namespace lasm
