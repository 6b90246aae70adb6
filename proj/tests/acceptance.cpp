// Acceptance criteria 1-12. Prints one PASS/FAIL line per criterion; exits 1 if any fails.
// Usage: acceptance [criterion ...]

#include "fixtures.hpp"
#include "lasm/asymptotics.hpp"
#include "lasm/geometry.hpp"
#include "lasm/green.hpp"
#include "lasm/sandpile.hpp"
#include "lasm/spectral.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace lasm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// One of the two test models with its limit shape and Green tables sized for N = 1e12.
struct TestModel {
  std::string name;
  ModelSpec spec;
  JumpKernel kernel;
  std::vector<VectorXd> dirs;
  ShapeCurve curve;
  double gamma_min = 0.0;
  std::vector<GreenTable> tables;
  Thresholds th;
};

std::unique_ptr<TestModel> build_model(const std::string& name, const ModelSpec& spec) {
  auto m = std::make_unique<TestModel>();
  m->name = name;
  m->spec = spec;
  m->kernel = krw_measure(spec);
  m->dirs = direction_grid(spec.dim, spec.dim == 2 ? 720 : 2000);
  m->curve = limit_shape(m->kernel, m->dirs);
  m->gamma_min = *std::min_element(m->curve.gamma.begin(), m->curve.gamma.end());
  const int box = default_box_radius(1e12, spec.min_threshold(), m->gamma_min) + 10;
  for (int c = 0; c < spec.colors; ++c) m->tables.push_back(green_table(m->kernel, c, box, 1e-20));
  m->th = threshold_constants(spec, m->tables);
  return m;
}

TestModel& square_model() {
  static auto m = build_model("uniform d=2", fixtures::square(2.0));
  return *m;
}

TestModel& fig1_model() {
  static auto m = build_model("four-color d=3", fixtures::fig1());
  return *m;
}

// Largest |a - b| / max(|a|, |b|) over the union of supports; values below `floor` count as zero.
double max_relative_difference(const SiteField& a, const SiteField& b, double floor) {
  double worst = 0.0;
  auto visit = [&](const SiteField& x, const SiteField& y) {
    for (const auto& [site, v] : x) {
      auto it = y.find(site);
      const double w = it == y.end() ? 0.0 : it->second;
      const double scale = std::max({std::abs(v), std::abs(w), floor});
      worst = std::max(worst, std::abs(v - w) / scale);
    }
  };
  visit(a, b);
  visit(b, a);
  return worst;
}

Outcome abelian_determinism() {
  const ModelSpec s = fixtures::fig1();
  SiteField reference;
  double worst = 0.0, slowest = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto t0 = Clock::now();
    StabilizeOptions opt;
    opt.order_seed = seed;
    StabilizeResult r = stabilize(s, point_source(3, 0, 1e6), opt);
    slowest = std::max(slowest, seconds_since(t0));
    if (seed == 0) reference = r.final.mass;
    else worst = std::max(worst, max_relative_difference(reference, r.final.mass, 1e-9));
  }
  return {worst <= 1e-6 && slowest < 10.0,
          fmt("max site-wise relative difference %.3g over 5 orders, slowest run %.2f s", worst, slowest)};
}

Outcome odometer_identity() {
  double worst_ratio = 0.0;
  for (const ModelSpec& s : {fixtures::fig1(), fixtures::square(2.0)})
    for (double n : {1e3, 1e6, 1e9}) {
      SandpileState init = point_source(s.dim, 0, n);
      StabilizeResult r = stabilize(s, init);
      SiteField lhs = apply_T(s, r.odometer);
      SiteField rhs = r.final.mass;
      for (const auto& [site, v] : init.mass) rhs[site] -= v;
      double sup = 0.0;
      for (const auto& [site, v] : lhs) {
        auto it = rhs.find(site);
        sup = std::max(sup, std::abs(v - (it == rhs.end() ? 0.0 : it->second)));
      }
      for (const auto& [site, v] : rhs)
        if (!lhs.count(site)) sup = std::max(sup, std::abs(v));
      worst_ratio = std::max(worst_ratio, sup / n);
    }
  return {worst_ratio <= 1e-6, fmt("max sup|Tu - (f - s0)| / N = %.3g over both models, N in {1e3, 1e6, 1e9}", worst_ratio)};
}

Outcome threshold_sandwich() {
  bool ok = true;
  std::string detail;
  for (TestModel* m : {&square_model(), &fig1_model()}) {
    long long violations = 0, checked = 0;
    for (double n : {1e4, 1e8, 1e12}) {
      StabilizeResult r = stabilize(m->spec, point_source(m->spec.dim, 0, n));
      SandwichReport rep = sandwich_check(m->tables[0], r.odometer, n, m->th.alpha, m->th.beta);
      violations += rep.missing_inner + rep.extra_outer + rep.outside_box;
      checked += rep.checked;
      ok = ok && rep.ok();
    }
    detail += fmt("%s%s: alpha %.4g, beta %.4g, %lld violations in %lld sites", detail.empty() ? "" : "; ",
                  m->name.c_str(), m->th.alpha, m->th.beta, violations, checked);
  }
  return {ok, detail};
}

Outcome green_inverse() {
  const TestModel& m = fig1_model();
  const int box = m.tables[0].radius;
  const int reach = m.kernel.max_offset_inf();
  double tail = 0.0;
  for (const auto& t : m.tables) tail = std::max(tail, t.tail_bound);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> w(-1.0, 1.0);
  double worst_excess = -1e300, worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SiteField v;
    const int spread = 3;
    for (int k = 0; k < 6; ++k) {
      Point x = Point::Zero(m.spec.dim);
      for (int a = 0; a < m.spec.dim; ++a) x[a] = static_cast<int>(rng() % (2 * spread + 1)) - spread;
      v[{x, static_cast<int>(rng() % m.spec.colors)}] += w(rng);
    }
    SiteField tgv = apply_T(m.spec, green_transpose_apply(m.tables, v));
    double sup = 0.0;
    for (const auto& [site, val] : tgv) {
      if (norm_inf(site.x) > box - spread - reach) continue;
      auto it = v.find(site);
      sup = std::max(sup, std::abs(val + (it == v.end() ? 0.0 : it->second)));
    }
    worst = std::max(worst, sup);
    worst_excess = std::max(worst_excess, sup - (tail + 1e-9));
  }
  return {worst_excess <= 0.0, fmt("max sup|T G^T v + v| = %.3g, bound tail %.3g + 1e-9, 20 random v", worst, tail)};
}

Outcome limit_shape_convergence() {
  auto t0 = Clock::now();
  TestModel& m = square_model();
  const double axis = support_value(m.kernel, VectorXd::Unit(2, 0)).h;
  const bool axis_ok = std::abs(axis - std::acosh(3.0)) <= 1e-9;
  // Cones holding no lattice point of the shape besides the origin cannot resolve outer(u).
  std::map<double, double> err;
  std::map<double, int> unresolved;
  for (double n : {1e6, 1e12}) {
    StabilizeResult r = stabilize(m.spec, point_source(2, 0, n));
    auto ext = radial_extents(shape_projection(r.odometer), m.dirs, 0.08);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.dirs.size(); ++i) {
      const double outer = ext[i].outer.value_or(0.0);
      if (outer <= 0.0) {
        ++unresolved[n];
        continue;
      }
      worst = std::max(worst, std::abs(outer / std::log(n) * m.curve.gamma[i] - 1.0));
    }
    err[n] = worst;
  }
  const double elapsed = seconds_since(t0);
  const bool ok = axis_ok && err[1e12] <= 0.05 && err[1e6] <= 0.10 && unresolved[1e6] + unresolved[1e12] == 0 &&
                  elapsed < 60.0;
  return {ok, fmt("axis gamma %.10f (arccosh 3 = %.10f); max |outer/log N - 1/gamma|*gamma over resolved cones: "
                  "%.4f at 1e12 (tol 0.05, %d of 720 unresolved), %.4f at 1e6 (tol 0.10, %d unresolved); %.1f s",
                  axis, std::acosh(3.0), err[1e12], unresolved[1e12], err[1e6], unresolved[1e6], elapsed)};
}

Outcome constant_gap() {
  bool ok = true;
  std::string detail;
  for (TestModel* m : {&square_model(), &fig1_model()}) {
    const auto dirs = direction_grid(m->spec.dim, m->spec.dim == 2 ? 72 : 100, 3);
    std::vector<double> logs;
    for (int e = 3; e <= 12; ++e) logs.push_back(e * std::log(10.0));
    const double mean_log = std::accumulate(logs.begin(), logs.end(), 0.0) / logs.size();
    double var = 0.0;
    for (double l : logs) var += (l - mean_log) * (l - mean_log);
    double worst_slope = 0.0, worst_gap = 0.0;
    for (const auto& u : dirs) {
      std::vector<double> gaps;
      for (double l : logs) {
        Radii r = radii(m->tables[0], u, std::exp(l), m->th.alpha, m->th.beta, 0);
        gaps.push_back(r.outer - r.inner);
      }
      const double mean_gap = std::accumulate(gaps.begin(), gaps.end(), 0.0) / gaps.size();
      double cov = 0.0;
      for (std::size_t k = 0; k < logs.size(); ++k) cov += (logs[k] - mean_log) * (gaps[k] - mean_gap);
      worst_slope = std::max(worst_slope, std::abs(cov / var));
      worst_gap = std::max(worst_gap, *std::max_element(gaps.begin(), gaps.end()));
    }
    const double bound = std::log(m->th.alpha / m->th.beta) / m->gamma_min + 0.5;
    ok = ok && worst_slope <= 0.02 && worst_gap <= bound;
    detail += fmt("%s%s: max |slope| %.4f (tol 0.02), max gap %.4f (bound %.4f)", detail.empty() ? "" : "; ",
                  m->name.c_str(), worst_slope, worst_gap, bound);
  }
  return {ok, detail};
}

Outcome polytope_regime() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec] : {std::pair<std::string, ModelSpec>{"L1 d=2", fixtures::square(2.0)},
                                   std::pair<std::string, ModelSpec>{"four-color d=3", fixtures::fig1()}}) {
    const auto dirs = direction_grid(spec.dim, spec.dim == 2 ? 720 : 2000);
    const auto xs = points_of(cycle_points(krw_measure(spec)));
    std::vector<double> hs;
    for (double m : {1e4, 1e6, 1e8}) {
      ShapeCurve c = limit_shape(krw_measure(with_uniform_leakiness(spec, m)), dirs);
      hs.push_back(hausdorff_convex(c.boundary(std::log(m)), xs, dirs));
    }
    const bool mono = hs[0] > hs[1] && hs[1] > hs[2];
    ok = ok && mono && hs[2] <= 0.05;
    detail += fmt("%s%s: d_H %.4f, %.4f, %.4f at m = 1e4, 1e6, 1e8 (tol 0.05, %s)", detail.empty() ? "" : "; ",
                  name.c_str(), hs[0], hs[1], hs[2], mono ? "decreasing" : "not decreasing");
  }
  return {ok, detail};
}

Outcome first_passage() {
  JumpKernel line = krw_measure(fixtures::line(2.0));
  bool line_ok = true;
  for (int n : {8, 16, 32, 64}) {
    FirstPassage fp = first_passage_set(line, n);
    std::set<int> got;
    for (const auto& s : fp.sites) got.insert(s.x[0]);
    std::set<int> want;
    for (int x = -n; x <= n; ++x) want.insert(x);
    line_ok = line_ok && got == want;
  }
  JumpKernel k = krw_measure(fixtures::fig1());
  Polytope hull = convex_hull(points_of(cycle_points(k)));
  std::vector<double> hs;
  for (int n : {8, 16, 32, 64}) hs.push_back(hausdorff_polytope_points(hull, first_passage_set(k, n).points, 1.0 / (2.0 * n)));
  bool halves = true;
  std::string ratios;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    const double q = hs[i] / hs[i + 1];
    halves = halves && std::abs(q - 2.0) <= 0.2;
    ratios += fmt("%s%.3f", i ? ", " : "", q);
  }
  return {line_ok && halves,
          fmt("line A_n = [-n, n]: %s; four-color d_H %.4f, %.4f, %.4f, %.4f at n = 8..64, ratios %s (2 +- 0.2)",
              line_ok ? "exact" : "MISMATCH", hs[0], hs[1], hs[2], hs[3], ratios.c_str())};
}

Outcome ellipsoid_regime() {
  const ModelSpec s = fixtures::square(2.0);
  Ellipsoid e = zero_leak_ellipsoid(conservative_kernel(s));
  const auto dirs = direction_grid(2, 720);
  StarBody target = sample_star(e, dirs);
  double ball = 0.0;
  for (double r : target.radius) ball = std::max(ball, std::abs(r - 0.5));
  const double m = 1.0001;
  ShapeCurve c = limit_shape(krw_measure(with_uniform_leakiness(s, m)), dirs);
  StarBody body = c.star();
  for (double& r : body.radius) r *= std::sqrt(m - 1.0);
  const double gap = spherical_gap(body, target);
  const double anchor = std::sqrt(m - 1.0) / std::acosh(2.0 * m - 1.0);
  const bool ok = gap <= 0.02 && ball <= 1e-6 && std::abs(anchor - 0.5) <= 1e-3;
  return {ok, fmt("spherical gap %.3g at m = 1.0001 (tol 0.02); energy ellipsoid is the 1/2 ball to %.1g; "
                  "sqrt(m-1)/arccosh(2m-1) = %.6f",
                  gap, ball, anchor)};
}

std::vector<VectorXd> random_body(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(0.5, 2.0);
  const int n = d + 4 + static_cast<int>(rng() % 25);
  VectorXd shift(d);
  for (int a = 0; a < d; ++a) shift[a] = 0.1 * g(rng);
  std::vector<VectorXd> pts;
  for (int k = 0; k < n; ++k) {
    VectorXd x(d);
    for (int a = 0; a < d; ++a) x[a] = g(rng);
    pts.push_back(r(rng) * x.normalized() + shift);
  }
  // Coordinate cross keeps the origin well inside.
  for (int a = 0; a < d; ++a)
    for (double sgn : {-0.4, 0.4}) pts.push_back(sgn * VectorXd::Unit(d, a));
  return pts;
}

MatrixXd random_rotation(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  return qr.householderQ();
}

std::vector<VectorXd> transformed(const std::vector<VectorXd>& pts, const MatrixXd& a) {
  std::vector<VectorXd> out;
  for (const auto& p : pts) out.push_back(a * p);
  return out;
}

Outcome duality_suite() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double involution = 0, inclusion = 0, scaling = 0, rotation = 0, ellipsoid = 0;
  int bodies = 0;
  for (int trial = 0; trial < 100; ++trial, ++bodies) {
    const int d = trial % 2 ? 3 : 2;
    const auto pts = random_body(rng, d);
    Polytope k = convex_hull(pts);
    Polytope kd = polar_dual(k);
    involution = std::max(involution, hausdorff(polar_dual(kd).vertices, k.vertices));

    auto bigger = pts;
    for (int extra = 0; extra < 5; ++extra) {
      VectorXd x(d);
      for (int a = 0; a < d; ++a) x[a] = g(rng);
      bigger.push_back(2.5 * x.normalized());
    }
    Polytope ld = polar_dual(convex_hull(bigger));
    for (const auto& v : ld.vertices)
      for (const auto& f : kd.facets) inclusion = std::max(inclusion, f.normal.dot(v) - f.offset);

    const double t = std::array<double, 3>{0.5, 2.0, 10.0}[trial % 3];
    Polytope tk = convex_hull(transformed(pts, t * MatrixXd::Identity(d, d)));
    scaling = std::max(scaling, hausdorff(polar_dual(tk).vertices, transformed(kd.vertices, MatrixXd::Identity(d, d) / t)));

    const MatrixXd q = random_rotation(rng, d);
    rotation = std::max(rotation, hausdorff(polar_dual(convex_hull(transformed(pts, q))).vertices, transformed(kd.vertices, q)));

    MatrixXd b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) b(i, j) = g(rng);
    const MatrixXd a = b * b.transpose() + 0.2 * MatrixXd::Identity(d, d);
    Ellipsoid e = make_ellipsoid(a), ed = polar_dual(e);
    ellipsoid = std::max(ellipsoid, (ed.a - a.inverse()).norm() / a.inverse().norm());
    for (int k2 = 0; k2 < 20; ++k2) {
      VectorXd u(d);
      for (int c = 0; c < d; ++c) u[c] = g(rng);
      u.normalize();
      ellipsoid = std::max(ellipsoid, std::abs(e.support(u) * ed.radial(u) - 1.0));
    }
  }
  const double worst = std::max({involution, inclusion, scaling, rotation, ellipsoid});
  return {worst <= 1e-8, fmt("%d random polygons/polyhedra: involution %.2g, inclusion reversal %.2g, scaling %.2g, "
                             "rotation %.2g, ellipsoid %.2g (tol 1e-8)",
                             bodies, involution, std::max(0.0, inclusion), scaling, rotation, ellipsoid)};
}

Outcome spectral_suite() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  std::normal_distribution<double> g;
  std::vector<JumpKernel> ks{krw_measure(fixtures::fig1()), krw_measure(fixtures::square(2.0)),
                             krw_measure(fixtures::line(2.0)), krw_measure(fixtures::fig1(1.1, 3.0))};
  double grad_err = 0.0, convexity = -1e300, rho0 = 0.0, doob = 0.0, round_trip = 0.0;
  int points = 0;
  for (const auto& k : ks) {
    rho0 = std::max(rho0, rho_at(k, VectorXd::Zero(k.dim)).rho);
    for (int n = 0; n < 25; ++n, ++points) {
      VectorXd t(k.dim);
      for (int a = 0; a < k.dim; ++a) t[a] = c(rng);
      SpectralPoint sp = rho_at(k, t);
      VectorXd fd(k.dim);
      const double h = 1e-5 * (1.0 + t.norm());
      for (int a = 0; a < k.dim; ++a) {
        VectorXd tp = t, tm = t;
        tp[a] += h;
        tm[a] -= h;
        fd[a] = (rho_at(k, tp).rho - rho_at(k, tm).rho) / (2.0 * h);
      }
      grad_err = std::max(grad_err, (sp.grad - fd).norm() / std::max(sp.grad.norm(), sp.rho));

      VectorXd s(k.dim);
      for (int a = 0; a < k.dim; ++a) s[a] = c(rng);
      for (double l : {0.25, 0.5, 0.75}) {
        const double lhs = std::log(rho_at(k, l * t + (1 - l) * s).rho);
        const double rhs = l * std::log(sp.rho) + (1 - l) * std::log(rho_at(k, s).rho);
        convexity = std::max(convexity, lhs - rhs);
      }

      VectorXd u(k.dim);
      for (int a = 0; a < k.dim; ++a) u[a] = g(rng);
      u.normalize();
      SupportPoint sv = support_value(k, u);
      SpectralPoint at = rho_at(k, sv.t);
      round_trip = std::max(round_trip, (at.grad / at.grad.norm() - u).norm());
      JumpKernel dk = doob_kernel(k, sv.t);
      for (int i = 0; i < dk.colors; ++i) doob = std::max(doob, std::abs(dk.row_mass(i) - 1.0));
    }
  }
  const bool ok = points >= 100 && grad_err <= 1e-6 && convexity <= 1e-12 && rho0 < 1.0 && doob <= 1e-10 &&
                  round_trip <= 1e-6;
  return {ok, fmt("%d points: gradient vs FD %.2g (tol 1e-6), log-convexity excess %.2g, max rho(0) %.4f, "
                  "Doob row sums %.2g (tol 1e-10), Gamma round trip %.2g (tol 1e-6)",
                  points, grad_err, std::max(0.0, convexity), rho0, doob, round_trip)};
}

Outcome lambert_and_extrapolation() {
  double w_err = 0.0;
  for (double e = -12; e <= 12; e += 0.01) {
    const double y = std::pow(10.0, e);
    const double w = lambert_w(y);
    w_err = std::max(w_err, std::abs(w * std::exp(w) - y) / std::max(1.0, y));
  }
  TestModel& m = square_model();
  const auto dirs = direction_grid(2, 72, 5);
  double worst = 0.0;
  for (const auto& u : dirs) {
    const double gamma = support_value(m.kernel, u).h;
    std::vector<double> ns, rs;
    for (double e = 6; e <= 9; e += 0.25) {
      ns.push_back(std::pow(10.0, e));
      rs.push_back(radii(m.tables[0], u, ns.back(), m.th.alpha, m.th.beta, 0).outer);
    }
    const double c0 = fit_c0(gamma, 2, ns, rs);
    const double measured = radii(m.tables[0], u, 1e12, m.th.alpha, m.th.beta, 0).outer;
    worst = std::max(worst, std::abs(predicted_radius(gamma, 2, 1e12, c0) - measured));
  }
  return {w_err <= 1e-12 && worst <= 0.5,
          fmt("|W e^W - y| / max(1, y) = %.2g on 1e-12..1e12 (tol 1e-12); radius extrapolation to 1e12 off by "
              "at most %.3f lattice units over 72 directions (tol 0.5)",
              w_err, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"abelian determinism", abelian_determinism},
      {"odometer identity", odometer_identity},
      {"threshold sandwich", threshold_sandwich},
      {"Green inverse", green_inverse},
      {"limit-shape convergence", limit_shape_convergence},
      {"constant gap", constant_gap},
      {"large-leak polytope", polytope_regime},
      {"first passage", first_passage},
      {"small-leak ellipsoid", ellipsoid_regime},
      {"duality suite", duality_suite},
      {"spectral suite", spectral_suite},
      {"Lambert W and extrapolation", lambert_and_extrapolation},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %-28s %s  [%.1f s] %s\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
