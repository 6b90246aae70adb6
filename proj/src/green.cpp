#include "lasm/green.hpp"

#include "lasm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace lasm {

namespace {

// Calls f(point) over the integer box [lo, hi] (inclusive), first axis fastest.
template <typename F>
void for_box(const std::vector<int>& lo, const std::vector<int>& hi, F&& f) {
  const int d = static_cast<int>(lo.size());
  for (int a = 0; a < d; ++a)
    if (lo[a] > hi[a]) return;
  Point x(d);
  for (int a = 0; a < d; ++a) x[a] = lo[a];
  while (true) {
    f(x);
    int a = 0;
    for (; a < d; ++a) {
      if (++x[a] <= hi[a]) break;
      x[a] = lo[a];
    }
    if (a == d) return;
  }
}

long long box_index(const Point& x, int radius) {
  const long long side = 2LL * radius + 1;
  long long idx = 0, stride = 1;
  for (Eigen::Index a = 0; a < x.size(); ++a) {
    idx += (x[a] + radius) * stride;
    stride *= side;
  }
  return idx;
}

}  // namespace

bool GreenTable::contains(const Point& x) const { return norm_inf(x) <= radius; }

double GreenTable::at(const Point& x, int color) const {
  if (!contains(x)) return 0.0;
  return values[static_cast<std::size_t>(box_index(x, radius) * colors + color)];
}

double GreenTable::color_sum(int color) const {
  double s = 0.0, c = 0.0;
  for (std::size_t k = static_cast<std::size_t>(color); k < values.size(); k += colors) {
    double y = values[k] - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

GreenTable green_table(const JumpKernel& kernel, int source, int box_radius, double eps_stop) {
  const int d = kernel.dim, p = kernel.colors;
  if (source < 0 || source >= p) throw ValidationError("green_table: source color out of range");
  if (!(eps_stop > 0.0)) throw ValidationError("green_table: eps_stop must be positive");
  if (box_radius < 0) throw ValidationError("green_table: negative box radius");

  // Space-free color masses decide when to stop.
  const MatrixXd l0 = laplace_matrix(kernel, VectorXd::Zero(d));
  if (spectral_radius(l0).rho >= 1.0 - 1e-15)
    throw NumericalError("green_table: mass does not decay (no leak)");
  Eigen::RowVectorXd mass = Eigen::RowVectorXd::Unit(p, source);
  int stop = 0;
  while (mass.sum() >= eps_stop) {
    mass = mass * l0;
    if (++stop > 10'000'000) throw NumericalError("green_table: mass decays too slowly");
  }
  const MatrixXd resolvent = (MatrixXd::Identity(p, p) - l0).inverse();

  GreenTable tab;
  tab.dim = d;
  tab.colors = p;
  tab.source = source;
  tab.radius = box_radius;
  tab.eps_stop = eps_stop;
  tab.steps = stop;
  tab.tail_bound = mass.sum();
  tab.tail_occupation = (mass * resolvent).sum();
  tab.total_occupation = resolvent.row(source).sum();

  // Exact per-axis reach after n steps (max-plus recursion over colors).
  const int inf_step = std::max(1, kernel.max_offset_inf());
  constexpr int kNone = std::numeric_limits<int>::min() / 4;
  std::vector<std::vector<int>> lo_n(stop + 1, std::vector<int>(d)), hi_n(stop + 1, std::vector<int>(d));
  {
    std::vector<std::vector<int>> hi(p, std::vector<int>(d, kNone)), lo(p, std::vector<int>(d, -kNone));
    hi[source].assign(d, 0);
    lo[source].assign(d, 0);
    for (int n = 0; n <= stop; ++n) {
      for (int a = 0; a < d; ++a) {
        int h = kNone, l = -kNone;
        for (int c = 0; c < p; ++c) {
          h = std::max(h, hi[c][a]);
          l = std::min(l, lo[c][a]);
        }
        // Cells farther than this cannot return to the box before the stop.
        const int window = box_radius + (stop - n) * inf_step;
        hi_n[n][a] = std::min(h, window);
        lo_n[n][a] = std::max(l, -window);
      }
      std::vector<std::vector<int>> nh(p, std::vector<int>(d, kNone)), nl(p, std::vector<int>(d, -kNone));
      for (const auto& e : kernel.entries) {
        if (hi[e.from][0] == kNone) continue;
        for (int a = 0; a < d; ++a) {
          nh[e.to][a] = std::max(nh[e.to][a], hi[e.from][a] + e.offset[a]);
          nl[e.to][a] = std::min(nl[e.to][a], lo[e.from][a] + e.offset[a]);
        }
      }
      hi.swap(nh);
      lo.swap(nl);
    }
  }

  std::vector<int> half(d, 0);
  for (int n = 0; n <= stop; ++n)
    for (int a = 0; a < d; ++a) half[a] = std::max({half[a], hi_n[n][a], -lo_n[n][a]});
  for (int a = 0; a < d; ++a) half[a] = std::min(half[a] + inf_step, box_radius + stop * inf_step);
  std::vector<long long> stride(d);
  double cells = p;
  long long total = 1;
  for (int a = 0; a < d; ++a) {
    stride[a] = total;
    total *= 2LL * half[a] + 1;
    cells *= 2.0 * half[a] + 1;
  }
  double box_cells = std::pow(2.0 * box_radius + 1, d) * p;
  if (2 * cells + box_cells > kGreenCellLimit)
    throw NumericalError("green_table: grid of " + std::to_string(cells) + " cells exceeds the memory guard");

  auto grid_index = [&](const Point& x) {
    long long idx = 0;
    for (int a = 0; a < d; ++a) idx += (x[a] + half[a]) * stride[a];
    return idx;
  };
  std::vector<long long> shift(kernel.entries.size());
  for (std::size_t k = 0; k < kernel.entries.size(); ++k) {
    long long s = 0;
    for (int a = 0; a < d; ++a) s += kernel.entries[k].offset[a] * stride[a];
    shift[k] = s;
  }
  std::vector<std::vector<std::size_t>> by_color(p);
  for (std::size_t k = 0; k < kernel.entries.size(); ++k) by_color[kernel.entries[k].from].push_back(k);

  std::vector<double> cur(static_cast<std::size_t>(total) * p, 0.0), next(cur.size(), 0.0);
  tab.values.assign(static_cast<std::size_t>(box_cells), 0.0);
  cur[static_cast<std::size_t>(grid_index(Point::Zero(d)) * p + source)] = 1.0;

  std::vector<int> store_lo(d), store_hi(d);
  for (int n = 0; n < stop; ++n) {
    for (int a = 0; a < d; ++a) {
      store_lo[a] = std::max(lo_n[n][a], -box_radius);
      store_hi[a] = std::min(hi_n[n][a], box_radius);
    }
    for_box(store_lo, store_hi, [&](const Point& x) {
      const std::size_t g = static_cast<std::size_t>(grid_index(x) * p);
      const std::size_t b = static_cast<std::size_t>(box_index(x, box_radius) * p);
      for (int c = 0; c < p; ++c) tab.values[b + c] += cur[g + c];
    });
    for_box(lo_n[n], hi_n[n], [&](const Point& x) {
      const long long g = grid_index(x);
      for (int c = 0; c < p; ++c) {
        double& v = cur[static_cast<std::size_t>(g * p + c)];
        if (v == 0.0) continue;
        for (std::size_t k : by_color[c]) {
          const auto& e = kernel.entries[k];
          next[static_cast<std::size_t>((g + shift[k]) * p + e.to)] += e.prob * v;
        }
        v = 0.0;
      }
    });
    cur.swap(next);
  }
  return tab;
}

double green_interp(const GreenTable& table, const VectorXd& x, int color) {
  const int d = table.dim;
  if (x.size() != d) throw ValidationError("green_interp: dimension mismatch");
  if (x.lpNorm<Eigen::Infinity>() > table.radius - 1 + 1e-12)
    throw NumericalError("green_interp: point outside the interpolation box");
  Point base(d);
  for (int a = 0; a < d; ++a) base[a] = static_cast<int>(std::floor(x[a]));
  double num = 0.0, den = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    Point y = base;
    for (int a = 0; a < d; ++a)
      if (corner & (1 << a)) y[a] += 1;
    const double w = 1.0 - (x - to_real(y)).lpNorm<Eigen::Infinity>();
    if (w <= 0.0) continue;
    num += w * table.at(y, color);
    den += w;
  }
  return num / den;
}

Thresholds threshold_constants(const ModelSpec& spec, const std::vector<GreenTable>& tables) {
  const int p = spec.colors;
  std::vector<const GreenTable*> by_source(p, nullptr);
  for (const auto& t : tables)
    if (t.source >= 0 && t.source < p) by_source[t.source] = &t;
  for (int j = 0; j < p; ++j)
    if (!by_source[j]) throw ValidationError("threshold_constants needs a table for every source color");

  std::vector<double> column(p, 0.0);
  for (int j = 0; j < p; ++j) {
    const GreenTable& t = *by_source[j];
    double stored = 0.0;
    std::vector<double> sums(p);
    for (int i = 0; i < p; ++i) stored += (sums[i] = t.color_sum(i));
    if (stored < 0.99 * t.total_occupation)
      throw NumericalError("Green table for source color " + std::to_string(j + 1) +
                           " stores under 99% of the occupation; enlarge the box");
    const double unstored = std::max(0.0, t.total_occupation - stored);
    for (int i = 0; i < p; ++i) column[i] += sums[i] + unstored;
  }
  Thresholds th;
  th.sup_occupation = *std::max_element(column.begin(), column.end());
  th.beta = spec.min_threshold();
  th.alpha = spec.max_threshold() * th.sup_occupation;
  return th;
}

Radii radii(const GreenTable& table, const VectorXd& u, double n, double alpha, double beta, int color) {
  const double a_level = alpha / n, b_level = beta / n;
  if (b_level <= table.tail_occupation || a_level <= table.tail_occupation)
    throw NumericalError("radii: threshold below the table accuracy; lower eps_stop");
  const double r_max = (table.radius - 1) / u.lpNorm<Eigen::Infinity>();
  auto g = [&](double r) { return green_interp(table, r * u, color); };
  constexpr double kStep = 0.25, kTol = 1e-6;
  Radii out;

  if (g(0.0) > a_level) {
    double prev = 0.0, r = kStep;
    while (true) {
      if (r > r_max) throw NumericalError("radii: alpha/N not reached inside the box");
      if (g(r) <= a_level) break;
      prev = r;
      r += kStep;
    }
    double lo = prev, hi = r;
    while (hi - lo > kTol) {
      double mid = 0.5 * (lo + hi);
      (g(mid) <= a_level ? hi : lo) = mid;
    }
    out.inner = hi;
  }

  if (g(r_max) >= b_level) throw NumericalError("radii: beta/N not reached inside the box");
  double prev = r_max, r = r_max - kStep;
  while (r > 0.0 && g(r) < b_level) {
    prev = r;
    r -= kStep;
  }
  if (r <= 0.0) {
    if (g(0.0) < b_level) return out;
    r = 0.0;
  }
  double lo = r, hi = prev;
  while (hi - lo > kTol) {
    double mid = 0.5 * (lo + hi);
    (g(mid) >= b_level ? lo : hi) = mid;
  }
  out.outer = lo;
  return out;
}

int default_box_radius(double n_max, double beta, double gamma_min) {
  return static_cast<int>(std::ceil(std::log(n_max / beta) / gamma_min)) + 10;
}

SiteField green_transpose_apply(const std::vector<GreenTable>& tables, const SiteField& v) {
  SiteField out;
  if (v.empty() || tables.empty()) return out;
  const int d = tables.front().dim, p = tables.front().colors, r = tables.front().radius;
  std::vector<const GreenTable*> by_source(p, nullptr);
  for (const auto& t : tables) by_source[t.source] = &t;
  std::vector<int> lo(d, std::numeric_limits<int>::min()), hi(d, std::numeric_limits<int>::max());
  for (const auto& [s, w] : v) {
    if (!by_source[s.color]) throw ValidationError("green_transpose_apply: missing source table");
    for (int a = 0; a < d; ++a) {
      lo[a] = std::max(lo[a], s.x[a] - r);
      hi[a] = std::min(hi[a], s.x[a] + r);
    }
  }
  for_box(lo, hi, [&](const Point& x) {
    for (int i = 0; i < p; ++i) {
      double acc = 0.0;
      for (const auto& [s, w] : v) acc += w * by_source[s.color]->at(x - s.x, i);
      if (acc != 0.0) out[{x, i}] = acc;
    }
  });
  return out;
}

SandwichReport sandwich_check(const GreenTable& table, const SiteField& odometer, double n,
                              double alpha, double beta) {
  SandwichReport r;
  r.slack = table.tail_occupation;
  for (const auto& [site, v] : odometer)
    if (v > 0 && !table.contains(site.x)) ++r.outside_box;
  std::vector<int> lo(table.dim, -table.radius), hi(table.dim, table.radius);
  for_box(lo, hi, [&](const Point& x) {
    for (int c = 0; c < table.colors; ++c) {
      const double g = table.at(x, c);
      auto it = odometer.find({x, c});
      const bool emitted = it != odometer.end() && it->second > 0;
      ++r.checked;
      if (!emitted && g - r.slack > alpha / n) ++r.missing_inner;
      if (emitted && g + r.slack < beta / n) ++r.extra_outer;
    }
  });
  return r;
}

void write_green_csv(std::ostream& out, const GreenTable& table) {
  for (int a = 1; a <= table.dim; ++a) out << "x_" << a << ',';
  out << "color,value\n";
  std::vector<int> lo(table.dim, -table.radius), hi(table.dim, table.radius);
  char buf[64];
  for_box(lo, hi, [&](const Point& x) {
    for (int c = 0; c < table.colors; ++c) {
      double v = table.at(x, c);
      if (v == 0.0) continue;
      for (int a = 0; a < table.dim; ++a) out << x[a] << ',';
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << c + 1 << ',' << buf << '\n';
    }
  });
}

}  // namespace lasm
