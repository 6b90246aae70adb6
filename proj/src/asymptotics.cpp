#include "lasm/asymptotics.hpp"

#include "lasm/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace lasm {

StarBody ShapeCurve::star() const {
  StarBody s;
  s.dirs = dirs;
  s.radius = radius;
  for (const auto& x : t) s.normals.push_back(x.normalized());
  return s;
}

std::vector<VectorXd> ShapeCurve::boundary(double scale) const {
  std::vector<VectorXd> out;
  out.reserve(dirs.size());
  for (std::size_t k = 0; k < dirs.size(); ++k) out.push_back(scale * radius[k] * dirs[k]);
  return out;
}

ShapeCurve limit_shape(const JumpKernel& kernel, const std::vector<VectorXd>& dirs, int threads) {
  ShapeCurve c;
  c.dim = kernel.dim;
  c.dirs = dirs;
  c.radius.assign(dirs.size(), 0.0);
  c.gamma.assign(dirs.size(), 0.0);
  c.t.assign(dirs.size(), VectorXd());
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(1, dirs.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto work = [&] {
    try {
      for (std::size_t k; (k = next++) < dirs.size();) {
        SupportPoint sp = support_value(kernel, dirs[k]);
        if (!(sp.h > 0)) throw NumericalError("limit_shape: non-positive support value");
        c.gamma[k] = sp.h;
        c.radius[k] = 1.0 / sp.h;
        c.t[k] = sp.t;
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(failure_lock);
      if (!failure) failure = std::current_exception();
      next = dirs.size();
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return c;
}

void write_shape_csv(std::ostream& out, const ShapeCurve& curve) {
  for (int a = 1; a <= curve.dim; ++a) out << "u_" << a << ',';
  out << "radius,gamma\n";
  char buf[64];
  for (std::size_t k = 0; k < curve.dirs.size(); ++k) {
    for (int a = 0; a < curve.dim; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g,", curve.dirs[k][a]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", curve.radius[k], curve.gamma[k]);
    out << buf;
  }
}

std::vector<CyclePoint> cycle_points(const JumpKernel& kernel, std::size_t cap) {
  std::vector<CyclePoint> out;
  for (const auto& c : simple_cycles(kernel, cap)) {
    CyclePoint p;
    p.point = to_real(c.displacement) / static_cast<double>(c.length());
    p.colors = c.colors;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<VectorXd> points_of(const std::vector<CyclePoint>& cps) {
  std::vector<VectorXd> out;
  out.reserve(cps.size());
  for (const auto& c : cps) out.push_back(c.point);
  return out;
}

FirstPassage first_passage_set(const JumpKernel& kernel, int n, std::size_t site_cap) {
  if (n < 0) throw ValidationError("first_passage_set: n must be non-negative");
  std::vector<std::vector<const JumpEntry*>> out_of(kernel.colors);
  for (const auto& e : kernel.entries)
    if (e.prob > 0) out_of[e.from].push_back(&e);

  SiteSet seen;
  std::vector<Site> frontier{{Point::Zero(kernel.dim), 0}};
  seen.insert(frontier.front());
  for (int step = 0; step < n && !frontier.empty(); ++step) {
    std::vector<Site> next;
    for (const auto& s : frontier)
      for (const JumpEntry* e : out_of[s.color]) {
        Site t{s.x + e->offset, e->to};
        if (seen.insert(t).second) next.push_back(t);
      }
    if (seen.size() > site_cap) throw NumericalError("first_passage_set: site cap exceeded");
    frontier.swap(next);
  }

  FirstPassage fp;
  fp.n = n;
  fp.sites.assign(seen.begin(), seen.end());
  std::sort(fp.sites.begin(), fp.sites.end());
  PointSet positions;
  for (const auto& s : fp.sites)
    if (positions.insert(s.x).second) fp.points.push_back(n > 0 ? VectorXd(to_real(s.x) / n) : to_real(s.x));
  return fp;
}

Ellipsoid zero_leak_ellipsoid(const JumpKernel& kernel) {
  for (double k : kernel.kill_prob)
    if (std::abs(k) > 1e-12) throw ValidationError("zero_leak_ellipsoid: kernel is killed");
  const VectorXd zero = VectorXd::Zero(kernel.dim);
  const SpectralPoint sp = rho_at(kernel, zero);
  if (sp.grad.norm() > 1e-8) {
    std::ostringstream msg;
    msg << "zero_leak_ellipsoid: non-zero drift (" << sp.grad.transpose() << ")";
    throw ValidationError(msg.str());
  }
  const MatrixXd sigma = hessian_at(kernel, zero, true);
  return make_ellipsoid(2.0 * sigma.inverse());
}

double predicted_radius(double gamma, int dim, double n, double c0) {
  if (!(n > std::exp(1.0))) throw ValidationError("predicted_radius: N must exceed e");
  if (!(gamma > 0)) throw ValidationError("predicted_radius: gamma must be positive");
  const double l = std::log(n);
  return l / gamma - (dim - 1) / (2.0 * gamma) * std::log(l) + c0;
}

double fit_c0(double gamma, int dim, const std::vector<double>& ns, const std::vector<double>& radii) {
  if (ns.empty() || ns.size() != radii.size()) throw ValidationError("fit_c0: mismatched samples");
  double sum = 0.0;
  for (std::size_t k = 0; k < ns.size(); ++k) sum += radii[k] - predicted_radius(gamma, dim, ns[k], 0.0);
  return sum / static_cast<double>(ns.size());
}

}  // namespace lasm
