#pragma once

#include "lasm/lattice.hpp"
#include "lasm/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <iosfwd>
#include <vector>

namespace lasm {

template <typename Scalar>
struct PerronPair {
  Scalar rho{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> right;  // ||.||_1 = 1
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> left;   // ||.||_1 = 1
  int iterations = 0;
};

/// Perron root and vectors of a non-negative irreducible matrix.
///
/// The matrix is first balanced by a diagonal similarity. Power iteration then runs on
/// B + cI with c a dense eigen-solve estimate of the root (the mean entry sum as fallback),
/// which separates the Perron root from the other peripheral eigenvalues of periodic
/// matrices. Two steps of inverse iteration polish the vectors. Throws NumericalError when the iteration cap is reached.
template <typename Derived>
PerronPair<typename Derived::Scalar> spectral_radius(const Eigen::MatrixBase<Derived>& a,
                                                     typename Derived::Scalar tol = 1e-13,
                                                     int cap = 100000) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = a.rows();
  if (n != a.cols() || n == 0) throw NumericalError("spectral_radius: square non-empty matrix required");
  if ((a.array() < Scalar(0)).any()) throw NumericalError("spectral_radius: negative entry");

  PerronPair<Scalar> out;
  if (n == 1) {
    out.rho = a(0, 0);
    out.right = out.left = Vec::Ones(1);
    return out;
  }

  if (!(a.sum() > Scalar(0))) throw NumericalError("spectral_radius: zero matrix");

  // Diagonal similarity B = D^{-1} A D equalizing off-diagonal row and column sums, so that
  // vectors of badly scaled matrices converge in every component.
  Vec dscale = Vec::Ones(n);
  Mat b = a;
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Scalar r = b.row(i).sum() - b(i, i), c = b.col(i).sum() - b(i, i);
      if (!(r > Scalar(0)) || !(c > Scalar(0))) continue;
      const Scalar f = std::sqrt(r / c);
      if (f > Scalar(2) || f < Scalar(0.5)) done = false;
      if (f == Scalar(1)) continue;
      dscale[i] *= f;
      b.row(i) /= f;
      b.col(i) *= f;
    }
    if (done) break;
  }

  // Shift by an estimate of the root: B + rho I keeps every other eigenvalue at most
  // half-way to the dominant one, also for periodic matrices.
  Scalar shift = b.sum() / Scalar(n);
  {
    Eigen::EigenSolver<Mat> es(b, false);
    if (es.info() == Eigen::Success) {
      const Scalar est = es.eigenvalues().real().maxCoeff();
      if (est > Scalar(0) && std::isfinite(static_cast<double>(est))) shift = est;
    }
  }
  const Mat shifted = b + shift * Mat::Identity(n, n);

  auto iterate = [&](const Mat& m, Vec& v) {
    v = Vec::Constant(n, Scalar(1) / Scalar(n));
    Scalar lambda = 0;
    for (int it = 1; it <= cap; ++it) {
      Vec w = m * v;
      lambda = w.sum();
      w /= lambda;
      Scalar change = (w - v).template lpNorm<Eigen::Infinity>();
      v.swap(w);
      out.iterations = std::max(out.iterations, it);
      if (change <= tol * v.maxCoeff()) {
        // Inverse iteration with a slightly perturbed shift sharpens the eigenvector.
        const Scalar sigma = lambda * (Scalar(1) + Scalar(64) * std::numeric_limits<Scalar>::epsilon());
        Eigen::PartialPivLU<Mat> lu(m - sigma * Mat::Identity(n, n));
        for (int k = 0; k < 2; ++k) {
          Vec y = lu.solve(v);
          if (!y.allFinite() || y.cwiseAbs().sum() == Scalar(0)) break;
          y /= y.sum();
          if ((y.array() < Scalar(0)).any()) break;
          v = y;
        }
        return;
      }
    }
    throw NumericalError("spectral_radius: power iteration did not converge (non-primitive input?)");
  };

  Vec right, left;
  iterate(shifted, right);
  const Mat shifted_t = shifted.transpose();
  iterate(shifted_t, left);
  out.rho = left.dot(b * right) / left.dot(right);
  out.right = dscale.cwiseProduct(right);
  out.left = left.cwiseQuotient(dscale);
  out.right /= out.right.sum();
  out.left /= out.left.sum();
  return out;
}

/// (L mu)(t)_{ij} = sum_x e^{t.x} mu_{ij}(x). Throws NumericalError past the overflow guard.
MatrixXd laplace_matrix(const JumpKernel& kernel, const VectorXd& t);

/// Largest allowed ||t||_inf: 700 / max offset 1-norm.
double overflow_guard(const JumpKernel& kernel);

struct SpectralPoint {
  VectorXd t;
  double rho = 0.0;
  VectorXd right;
  VectorXd left;
  VectorXd grad;
};

/// rho(t), the Perron vectors and the gradient psi^T (dL/dt_k) phi / psi^T phi.
SpectralPoint rho_at(const JumpKernel& kernel, const VectorXd& t);

/// Central-difference Hessian of rho from the analytic gradient, step 1e-4 (1 + ||t||).
/// With `check_pd` the result must factor as positive definite, else NumericalError.
MatrixXd hessian_at(const JumpKernel& kernel, const VectorXd& t, bool check_pd = false);

/// r > 0 with rho(r v) = 1 to 1e-10 (bracket, bisection, Newton on log rho).
double boundary_ray(const JumpKernel& kernel, const VectorXd& v);

struct SupportPoint {
  VectorXd u;
  double h = 0.0;          // t_u . u
  VectorXd t;              // maximizer of t.u over {rho <= 1}
  double kkt_residual = 0;  // ||grad rho(t) - lambda u|| with lambda = grad rho . u
  double normal_error = 0;  // ||grad rho / ||grad rho|| - u||
  int iterations = 0;
};

/// Maximizes t.u over {rho <= 1}; the value is Gamma^{-1}(u).u.
SupportPoint support_value(const JumpKernel& kernel, const VectorXd& u);

/// Twisted kernel (phi_j / phi_i) e^{t.x} mu_{ij}(x) for t on {rho = 1}.
JumpKernel doob_kernel(const JumpKernel& kernel, const VectorXd& t);

/// "u_1..u_d,h,t_1..t_d,kkt_residual" rows.
void write_boundary_csv(std::ostream& out, const std::vector<SupportPoint>& samples);

}  // namespace lasm
