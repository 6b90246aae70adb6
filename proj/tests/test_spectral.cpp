#include "fixtures.hpp"
#include "lasm/spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace lasm;
using fixtures::pt;

namespace {

double dense_perron(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a);
  double best = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) best = std::max(best, std::abs(es.eigenvalues()[k]));
  return best;
}

VectorXd vec2(double a, double b) { return (VectorXd(2) << a, b).finished(); }

JumpKernel random_kernel(std::mt19937_64& rng, int d, int p) {
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<TopplingEntry> e;
  for (int i = 0; i < p; ++i) {
    e.push_back({Point::Zero(d), i, (i + 1) % p, w(rng)});
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        Point x = Point::Zero(d);
        x[a] = s;
        if (a == 0 && s == 1) x[d - 1] += s;
        e.push_back({x, i, static_cast<int>(rng() % p), w(rng)});
      }
  }
  // Make keys unique by merging duplicates.
  std::vector<TopplingEntry> merged;
  for (auto& x : e) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const TopplingEntry& y) {
      return y.from == x.from && y.to == x.to && (y.offset.array() == x.offset.array()).all();
    });
    if (it == merged.end()) merged.push_back(x);
    else it->weight += x.weight;
  }
  std::uniform_real_distribution<double> m(1.05, 4.0);
  std::vector<double> ms(p);
  for (auto& v : ms) v = m(rng);
  return krw_measure(make_model(d, p, ms, merged));
}

}  // namespace

TEST_CASE("spectral_radius trivial cases") {
  auto a = spectral_radius(MatrixXd(0.5 * MatrixXd::Identity(3, 3)));
  CHECK(a.rho == doctest::Approx(0.5).epsilon(1e-14));
  for (int k = 0; k < 3; ++k) {
    CHECK(a.right[k] == doctest::Approx(1.0 / 3));
    CHECK(a.left[k] == doctest::Approx(1.0 / 3));
  }
  MatrixXd one(1, 1);
  one << 0.7;
  CHECK(spectral_radius(one).rho == 0.7);
}

TEST_CASE("four-color Laplace matrix at zero") {
  JumpKernel k = krw_measure(fixtures::fig1());
  MatrixXd l = laplace_matrix(k, VectorXd::Zero(3));
  for (int j = 1; j < 4; ++j) {
    CHECK(l(0, j) == doctest::Approx(0.25));
    CHECK(l(j, 0) == doctest::Approx(0.5));
  }
  CHECK(l(0, 0) == 0.0);
  auto pp = spectral_radius(l);
  CHECK(std::abs(pp.rho - dense_perron(l)) <= 1e-12 * pp.rho);
  CHECK(pp.rho == doctest::Approx(std::sqrt(3.0 / 8.0)).epsilon(1e-13));
  CHECK((l * pp.right - pp.rho * pp.right).lpNorm<Eigen::Infinity>() <= 1e-10);
  CHECK((pp.right.array() > 0).all());
  CHECK((pp.left.array() > 0).all());
}

TEST_CASE("spectral_radius agrees with the dense eigen solver") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 7);
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = u(rng) < 0.4 ? u(rng) : 0.0;
    for (int i = 0; i < n; ++i) a(i, (i + 1) % n) += 0.1 + u(rng);  // irreducible
    if (trial % 3 == 0) {  // periodic: pure cycle
      a.setZero();
      for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = 0.1 + u(rng);
    }
    auto pp = spectral_radius(a);
    CHECK(std::abs(pp.rho - dense_perron(a)) <= 1e-12 * pp.rho);
    CHECK((a * pp.right - pp.rho * pp.right).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("closed forms for nearest-neighbour kernels") {
  JumpKernel sq = krw_measure(fixtures::square(2.0));
  for (auto t : {vec2(0, 0), vec2(0.3, -1.2), vec2(2, 1)}) {
    MatrixXd l = laplace_matrix(sq, t);
    CHECK(l(0, 0) == doctest::Approx((std::cosh(t[0]) + std::cosh(t[1])) / 4).epsilon(1e-14));
  }
  SpectralPoint z = rho_at(sq, vec2(0, 0));
  CHECK(z.rho == doctest::Approx(0.5));
  CHECK(z.grad.norm() <= 1e-15);

  JumpKernel ln = krw_measure(fixtures::line(3.0));
  for (double t : {-1.5, 0.2, 2.0}) {
    SpectralPoint sp = rho_at(ln, VectorXd::Constant(1, t));
    CHECK(sp.rho == doctest::Approx(std::cosh(t) / 3).epsilon(1e-14));
    CHECK(sp.grad[0] == doctest::Approx(std::sinh(t) / 3).epsilon(1e-13));
  }
  CHECK_THROWS_AS(laplace_matrix(ln, VectorXd::Constant(1, 800.0)), NumericalError);
}

TEST_CASE("perturbation gradient matches finite differences") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  std::vector<JumpKernel> ks{krw_measure(fixtures::fig1()), krw_measure(fixtures::square(2.0))};
  for (int k = 0; k < 4; ++k) ks.push_back(random_kernel(rng, 2 + k % 2, 1 + k));
  int points = 0;
  for (const auto& k : ks)
    for (int n = 0; n < 20; ++n, ++points) {
      VectorXd t(k.dim);
      for (int a = 0; a < k.dim; ++a) t[a] = c(rng);
      SpectralPoint sp = rho_at(k, t);
      VectorXd fd(k.dim);
      const double h = 1e-5 * (1 + t.norm());
      for (int a = 0; a < k.dim; ++a) {
        VectorXd tp = t, tm = t;
        tp[a] += h;
        tm[a] -= h;
        fd[a] = (rho_at(k, tp).rho - rho_at(k, tm).rho) / (2 * h);
      }
      CHECK((sp.grad - fd).norm() <= 1e-6 * (1 + sp.grad.norm()));
    }
  CHECK(points >= 100);
}

TEST_CASE("rho is log-convex and below one at the origin") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::vector<JumpKernel> ks{krw_measure(fixtures::fig1()), krw_measure(fixtures::square(1.3))};
  for (int k = 0; k < 3; ++k) ks.push_back(random_kernel(rng, 2, 2 + k));
  for (const auto& k : ks) {
    CHECK(rho_at(k, VectorXd::Zero(k.dim)).rho < 1.0);
    for (int n = 0; n < 30; ++n) {
      VectorXd a(k.dim), b(k.dim);
      for (int i = 0; i < k.dim; ++i) {
        a[i] = c(rng);
        b[i] = c(rng);
      }
      for (double l : {0.25, 0.5, 0.75}) {
        double lhs = std::log(rho_at(k, l * a + (1 - l) * b).rho);
        double rhs = l * std::log(rho_at(k, a).rho) + (1 - l) * std::log(rho_at(k, b).rho);
        CHECK(lhs <= rhs + 1e-9);
      }
    }
  }
}

TEST_CASE("boundary_ray closed forms") {
  JumpKernel ln = krw_measure(fixtures::line(2.0));
  CHECK(boundary_ray(ln, VectorXd::Constant(1, 1.0)) == doctest::Approx(std::acosh(2.0)).epsilon(1e-11));
  CHECK(boundary_ray(ln, VectorXd::Constant(1, -1.0)) == doctest::Approx(std::acosh(2.0)).epsilon(1e-11));

  // (cosh r + 1) / 4 = 1 on the axis.
  JumpKernel sq = krw_measure(fixtures::square(2.0));
  double r = boundary_ray(sq, vec2(1, 0));
  CHECK(r == doctest::Approx(std::acosh(3.0)).epsilon(1e-11));
  CHECK(std::abs(rho_at(sq, vec2(r, 0)).rho - 1) <= 1e-10);
  CHECK(boundary_ray(sq, vec2(-1, 0)) == doctest::Approx(r).epsilon(1e-12));

  JumpKernel f = krw_measure(fixtures::fig1());
  VectorXd v = (VectorXd(3) << 0.2, -0.5, 0.7).finished().normalized();
  CHECK(boundary_ray(f, v) == doctest::Approx(boundary_ray(f, -v)).epsilon(1e-11));
}

TEST_CASE("support_value closed forms and dense-sampling oracle") {
  JumpKernel ln = krw_measure(fixtures::line(5.0));
  CHECK(support_value(ln, VectorXd::Constant(1, 1.0)).h == doctest::Approx(std::acosh(5.0)).epsilon(1e-11));

  JumpKernel sq = krw_measure(fixtures::square(2.0));
  SupportPoint ax = support_value(sq, vec2(1, 0));
  CHECK(ax.h == doctest::Approx(std::acosh(3.0)).epsilon(1e-10));
  CHECK(std::abs(ax.t[1]) <= 1e-8);
  CHECK(support_value(sq, vec2(0, 1)).h == doctest::Approx(ax.h).epsilon(1e-10));

  // Boundary of {cosh t1 + cosh t2 <= 4} sampled densely in t1.
  std::vector<VectorXd> boundary;
  const double top = std::acosh(3.0);
  for (int k = 0; k <= 200000; ++k) {
    double t1 = -top + 2 * top * k / 200000.0;
    double t2 = std::acosh(std::max(1.0, 4 - std::cosh(t1)));
    boundary.push_back(vec2(t1, t2));
    boundary.push_back(vec2(t1, -t2));
  }
  for (double ang : {0.3, 0.785398, 1.2, 2.5, 4.0}) {
    VectorXd u = vec2(std::cos(ang), std::sin(ang));
    double best = -1e9;
    for (const auto& t : boundary) best = std::max(best, t.dot(u));
    SupportPoint s = support_value(sq, u);
    CHECK(std::abs(s.h - best) <= 1e-7);
    CHECK(s.kkt_residual <= 1e-8);
    CHECK(std::abs(rho_at(sq, s.t).rho - 1) <= 1e-10);
  }
}

TEST_CASE("support_value on nearly flat faces") {
  // Large leakiness rounds the four-color body into a cube; directions with one tiny
  // component put the maximizer far out on an edge.
  JumpKernel k = krw_measure(fixtures::fig1(1e8, 1e8));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<VectorXd> boundary;
  for (int i = 0; i < 4000; ++i) {
    VectorXd v(3);
    for (int j = 0; j < 3; ++j) v[j] = g(rng);
    boundary.push_back(boundary_ray(k, v) * v);
  }
  std::vector<VectorXd> dirs;
  for (int i = 0; i < 200; ++i) {
    VectorXd u(3);
    for (int j = 0; j < 3; ++j) u[j] = g(rng);
    dirs.push_back(u.normalized());
  }
  for (double tiny : {5e-4, -2.5e-4, 2e-3}) {
    VectorXd u(3);
    u << tiny, -0.8, 0.6;
    dirs.push_back(u.normalized());
    u << -0.86, -0.5, tiny;
    dirs.push_back(u.normalized());
  }
  for (const auto& u : dirs) {
    SupportPoint s = support_value(k, u);
    CHECK(s.kkt_residual <= 1e-8);
    CHECK(std::abs(rho_at(k, s.t).rho - 1) <= 1e-10);
    double best = -1e9;
    for (const auto& t : boundary) best = std::max(best, t.dot(u));
    CHECK(s.h >= best - 1e-9);
    CHECK(s.h <= best + 0.05 * s.h);
  }
}

TEST_CASE("Gamma round trip and domination of the ray point") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  std::vector<JumpKernel> ks{krw_measure(fixtures::fig1()), krw_measure(fixtures::square(2.0))};
  ks.push_back(random_kernel(rng, 2, 3));
  for (const auto& k : ks)
    for (int n = 0; n < 15; ++n) {
      VectorXd u(k.dim);
      for (int a = 0; a < k.dim; ++a) u[a] = g(rng);
      u.normalize();
      SupportPoint s = support_value(k, u);
      SpectralPoint sp = rho_at(k, s.t);
      CHECK((sp.grad / sp.grad.norm() - u).norm() <= 1e-6);
      CHECK(s.h > 0);
      CHECK(s.h >= boundary_ray(k, u) - 1e-10);
    }
}

TEST_CASE("Doob transform rows sum to one") {
  JumpKernel ln = krw_measure(fixtures::line(2.0));
  const double t = std::acosh(2.0);
  JumpKernel dk = doob_kernel(ln, VectorXd::Constant(1, t));
  for (const auto& e : dk.entries) {
    if (e.offset[0] == 1) CHECK(e.prob == doctest::Approx(std::exp(t) / 4));
    else CHECK(e.prob == doctest::Approx(std::exp(-t) / 4));
  }
  CHECK(std::abs(dk.row_mass(0) - 1) <= 1e-10);

  JumpKernel f = krw_measure(fixtures::fig1());
  VectorXd v = VectorXd::Unit(3, 0);
  JumpKernel df = doob_kernel(f, boundary_ray(f, v) * v);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(df.row_mass(i) - 1) <= 1e-10);
  CHECK_THROWS(doob_kernel(f, VectorXd::Zero(3)));
}

TEST_CASE("Hessian at the origin of leak-free kernels") {
  MatrixXd s2 = hessian_at(conservative_kernel(fixtures::square(2.0)), VectorXd::Zero(2), true);
  CHECK((s2 - 0.5 * MatrixXd::Identity(2, 2)).norm() <= 1e-7);
  MatrixXd s1 = hessian_at(conservative_kernel(fixtures::line()), VectorXd::Zero(1), true);
  CHECK(s1(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  JumpKernel f = krw_measure(fixtures::fig1());
  MatrixXd hf = hessian_at(f, VectorXd::Constant(3, 0.3));
  CHECK((hf - hf.transpose()).norm() <= 1e-8);
}
