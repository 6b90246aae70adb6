#include "lasm/spectral.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <limits>
#include <ostream>

namespace lasm {

namespace {

void check_guard(const JumpKernel& kernel, const VectorXd& t) {
  if (t.size() != kernel.dim) throw ValidationError("parameter dimension mismatch");
  if (!t.allFinite() || t.lpNorm<Eigen::Infinity>() > overflow_guard(kernel))
    throw NumericalError("laplace transform parameter beyond the overflow guard");
}

// Rescales every iterate radially onto {rho = 1}.
VectorXd project(const JumpKernel& kernel, const VectorXd& t) {
  const double n = t.norm();
  const VectorXd v = t / n;
  return boundary_ray(kernel, v) * v;
}

// log rho with its analytic gradient and Hessian.
struct LogRho {
  VectorXd t;
  double value = 0.0;
  VectorXd grad;
  MatrixXd hess;
};

LogRho log_rho(const JumpKernel& kernel, const VectorXd& t) {
  check_guard(kernel, t);
  const int p = kernel.colors, d = kernel.dim;
  MatrixXd l = MatrixXd::Zero(p, p);
  std::vector<MatrixXd> l1(d, MatrixXd::Zero(p, p));
  std::vector<MatrixXd> l2(d * d, MatrixXd::Zero(p, p));
  for (const auto& e : kernel.entries) {
    const VectorXd x = to_real(e.offset);
    const double w = std::exp(t.dot(x)) * e.prob;
    l(e.from, e.to) += w;
    for (int a = 0; a < d; ++a) {
      l1[a](e.from, e.to) += x[a] * w;
      for (int b = 0; b < d; ++b) l2[a * d + b](e.from, e.to) += x[a] * x[b] * w;
    }
  }
  auto pp = spectral_radius(l);
  VectorXd phi = pp.right, psi = pp.left / pp.left.dot(pp.right);
  // Reduced resolvent S = (rho I - L)^# from (rho I - L + phi psi^T)^{-1} - phi psi^T.
  const MatrixXd proj = phi * psi.transpose();
  const MatrixXd s = (pp.rho * MatrixXd::Identity(p, p) - l + proj).fullPivLu().inverse() - proj;
  VectorXd g(d);
  std::vector<VectorXd> lphi(d);
  std::vector<Eigen::RowVectorXd> psil(d);
  for (int a = 0; a < d; ++a) {
    lphi[a] = l1[a] * phi;
    psil[a] = psi.transpose() * l1[a];
    g[a] = psi.dot(lphi[a]);
  }
  MatrixXd h(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b <= a; ++b)
      h(a, b) = h(b, a) = psi.dot(l2[a * d + b] * phi) + psil[a] * s * lphi[b] + psil[b] * s * lphi[a];
  LogRho out;
  out.t = t;
  out.value = std::log(pp.rho);
  out.grad = g / pp.rho;
  out.hess = h / pp.rho - out.grad * out.grad.transpose();
  return out;
}

}  // namespace

double overflow_guard(const JumpKernel& kernel) {
  return 700.0 / std::max(1, kernel.max_offset_norm1());
}

MatrixXd laplace_matrix(const JumpKernel& kernel, const VectorXd& t) {
  check_guard(kernel, t);
  MatrixXd l = MatrixXd::Zero(kernel.colors, kernel.colors);
  for (const auto& e : kernel.entries) l(e.from, e.to) += std::exp(t.dot(to_real(e.offset))) * e.prob;
  return l;
}

SpectralPoint rho_at(const JumpKernel& kernel, const VectorXd& t) {
  check_guard(kernel, t);
  const int p = kernel.colors, d = kernel.dim;
  MatrixXd l = MatrixXd::Zero(p, p);
  std::vector<MatrixXd> dl(d, MatrixXd::Zero(p, p));
  for (const auto& e : kernel.entries) {
    const VectorXd x = to_real(e.offset);
    const double w = std::exp(t.dot(x)) * e.prob;
    l(e.from, e.to) += w;
    for (int k = 0; k < d; ++k) dl[k](e.from, e.to) += x[k] * w;
  }
  auto pp = spectral_radius(l);
  SpectralPoint sp;
  sp.t = t;
  sp.rho = pp.rho;
  sp.right = pp.right;
  sp.left = pp.left;
  sp.grad.resize(d);
  const double norm = pp.left.dot(pp.right);
  for (int k = 0; k < d; ++k) sp.grad[k] = pp.left.dot(dl[k] * pp.right) / norm;
  return sp;
}

MatrixXd hessian_at(const JumpKernel& kernel, const VectorXd& t, bool check_pd) {
  const int d = kernel.dim;
  const double h = 1e-4 * (1.0 + t.norm());
  MatrixXd hs(d, d);
  for (int i = 0; i < d; ++i) {
    VectorXd tp = t, tm = t;
    tp[i] += h;
    tm[i] -= h;
    hs.col(i) = (rho_at(kernel, tp).grad - rho_at(kernel, tm).grad) / (2.0 * h);
  }
  MatrixXd sym = 0.5 * (hs + hs.transpose());
  if (check_pd) {
    Eigen::LLT<MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success) throw NumericalError("Hessian of the spectral radius is not positive definite");
  }
  return sym;
}

double boundary_ray(const JumpKernel& kernel, const VectorXd& v) {
  const double rho0 = rho_at(kernel, VectorXd::Zero(kernel.dim)).rho;
  if (!(rho0 < 1.0)) throw NumericalError("boundary_ray requires rho(0) < 1");
  const double limit = overflow_guard(kernel) / std::max(1e-300, v.lpNorm<Eigen::Infinity>());
  auto logrho = [&](double r) { return std::log(rho_at(kernel, r * v).rho); };

  double lo = 0.0, hi = std::min(1.0, limit);
  while (logrho(hi) < 0.0) {
    lo = hi;
    if (hi >= limit) throw NumericalError("boundary_ray: no bracket inside the overflow guard");
    hi = std::min(2.0 * hi, limit);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    (logrho(mid) < 0.0 ? lo : hi) = mid;
  }
  // Safeguarded Newton on log rho along the ray.
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    SpectralPoint sp = rho_at(kernel, r * v);
    double f = std::log(sp.rho);
    if (std::abs(sp.rho - 1.0) <= 1e-13) return r;
    (f < 0.0 ? lo : hi) = r;
    double slope = sp.grad.dot(v) / sp.rho;
    double next = slope > 0.0 ? r - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= 1e-16 * r) {
      r = next;
      break;
    }
    r = next;
  }
  if (std::abs(rho_at(kernel, r * v).rho - 1.0) > 1e-10)
    throw NumericalError("boundary_ray: Newton polish failed");
  return r;
}

SupportPoint support_value(const JumpKernel& kernel, const VectorXd& u_in) {
  const int d = kernel.dim;
  const VectorXd u = u_in / u_in.norm();
  SupportPoint out;
  out.u = u;

  struct State {
    LogRho at;
    double error = 0.0;
  };
  auto evaluate = [&](const VectorXd& dir) -> std::optional<State> {
    if (!(dir.allFinite() && dir.norm() > 0.0)) return std::nullopt;
    try {
      State st{log_rho(kernel, project(kernel, dir)), 0.0};
      st.error = (st.at.grad / st.at.grad.norm() - u).norm();
      return st;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };

  auto start = evaluate(u);
  if (!start) throw NumericalError("support_value: no boundary point in direction u");
  State cur = *start;
  double radius = 0.5 * (1.0 + cur.at.t.norm());
  int it = 0;
  for (; it < 500 && cur.error > 1e-13; ++it) {
    const VectorXd& g = cur.at.grad;
    const double nu = u.dot(g) / g.squaredNorm();
    // Bordered Newton system for u - nu grad = 0, log rho = 0.
    MatrixXd k(d + 1, d + 1);
    k.topLeftCorner(d, d) = nu * cur.at.hess;
    k.topRightCorner(d, 1) = g;
    k.bottomLeftCorner(1, d) = g.transpose();
    k(d, d) = 0.0;
    VectorXd rhs(d + 1);
    rhs.head(d) = u - nu * g;
    rhs(d) = -cur.at.value;
    VectorXd newton = k.fullPivLu().solve(rhs).head(d);
    VectorXd tangent = rhs.head(d);
    if (tangent.norm() > 0.0) tangent *= 1e3 * radius / tangent.norm();

    bool accepted = false;
    while (!accepted && radius > 1e-15 * (1.0 + cur.at.t.norm())) {
      for (const VectorXd* dir : {&newton, &tangent}) {
        VectorXd step = *dir;
        if (!step.allFinite() || step.norm() == 0.0) continue;
        if (step.norm() > radius) step *= radius / step.norm();
        auto cand = evaluate(cur.at.t + step);
        if (!cand) continue;
        // u.t is the merit; steps that only sharpen the normal must not cost more than rounding.
        const double slack = 1e-12 * cur.error + 1e-15;
        const double gain = u.dot(cand->at.t) - u.dot(cur.at.t);
        const double scale = 1.0 + std::abs(u.dot(cur.at.t));
        if (gain > 1e-15 * scale || (cand->error < cur.error - slack && gain >= -1e-13 * scale)) {
          cur = std::move(*cand);
          accepted = true;
          if (step.norm() >= 0.99 * radius) radius *= 2.0;
          break;
        }
      }
      if (!accepted) radius *= 0.25;
    }
    if (!accepted) break;
  }

  const SpectralPoint sp = rho_at(kernel, cur.at.t);
  out.iterations = it;
  out.t = cur.at.t;
  out.h = out.t.dot(u);
  out.normal_error = (sp.grad / sp.grad.norm() - u).norm();
  out.kkt_residual = (sp.grad - sp.grad.dot(u) * u).norm();
  if (out.normal_error > 1e-9 || !(out.h > 0.0) || std::abs(sp.rho - 1.0) > 1e-10)
    throw NumericalError("support_value did not converge (normal error " + std::to_string(out.normal_error) + ")");
  return out;
}

JumpKernel doob_kernel(const JumpKernel& kernel, const VectorXd& t) {
  SpectralPoint sp = rho_at(kernel, t);
  if (std::abs(sp.rho - 1.0) > 1e-10) throw ValidationError("doob_kernel requires rho(t) = 1");
  std::vector<JumpEntry> entries;
  entries.reserve(kernel.entries.size());
  for (const auto& e : kernel.entries) {
    double w = sp.right[e.to] / sp.right[e.from] * std::exp(t.dot(to_real(e.offset))) * e.prob;
    entries.push_back({e.offset, e.from, e.to, std::min(w, 1.0)});
  }
  return make_kernel(kernel.dim, kernel.colors, std::move(entries));
}

void write_boundary_csv(std::ostream& out, const std::vector<SupportPoint>& samples) {
  if (samples.empty()) return;
  const int d = static_cast<int>(samples.front().u.size());
  for (int a = 1; a <= d; ++a) out << "u_" << a << ',';
  out << 'h';
  for (int a = 1; a <= d; ++a) out << ",t_" << a;
  out << ",kkt_residual\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const auto& s : samples) {
    for (int a = 0; a < d; ++a) {
      put(s.u[a]);
      out << ',';
    }
    put(s.h);
    for (int a = 0; a < d; ++a) {
      out << ',';
      put(s.t[a]);
    }
    out << ',';
    put(s.kkt_residual);
    out << '\n';
  }
}

}  // namespace lasm
