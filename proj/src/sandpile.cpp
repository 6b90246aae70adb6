#include "lasm/sandpile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

namespace lasm {

namespace {

struct Outgoing {
  Point offset;
  int to;
  double weight;
};

std::vector<std::vector<Outgoing>> outgoing(const ModelSpec& spec) {
  std::vector<std::vector<Outgoing>> out(spec.colors);
  for (const auto& e : spec.entries) out[e.from].push_back({e.offset, e.to, e.weight});
  return out;
}

// Neumaier compensated accumulator.
struct Accum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
    else comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::vector<Site> sorted_sites(const SiteField& f) {
  std::vector<Site> s;
  s.reserve(f.size());
  for (const auto& kv : f) s.push_back(kv.first);
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double SandpileState::total() const {
  Accum a;
  for (const auto& kv : mass) a.add(kv.second);
  return a.value();
}

SandpileState point_source(int dim, int color, double n) {
  SandpileState s;
  s.mass[{Point::Zero(dim), color}] = n;
  return s;
}

double topple_count(double mass, double threshold) {
  if (!(mass > threshold + kStabilitySlack)) return 0.0;
  double k = std::max(0.0, std::ceil(mass / threshold) - 1.0);
  auto rest = [&](double j) { return std::fma(-j, threshold, mass); };
  // Steps of one topple, or one ulp once counts exceed 2^53.
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto up = [&](double j) { return std::max(j + 1.0, std::nextafter(j, inf)); };
  auto down = [&](double j) { return std::max(0.0, std::min(j - 1.0, std::nextafter(j, -inf))); };
  while (rest(k) > threshold + kStabilitySlack) k = up(k);
  while (k > 0.0 && rest(down(k)) <= threshold + kStabilitySlack) k = down(k);
  return k;
}

StabilizeResult stabilize(const ModelSpec& spec, const SandpileState& initial,
                          const StabilizeOptions& options) {
  struct Cell {
    Accum mass;
    double topples = 0.0;
    bool queued = false;
  };

  const auto out = outgoing(spec);
  SiteMap<Cell> cells;
  cells.reserve(initial.mass.size() * 4 + 64);
  std::deque<Site> queue;
  std::mt19937_64 rng(options.order_seed);
  const bool shuffle = options.order_seed != 0;

  double initial_total = 0.0;
  for (const auto& site : sorted_sites(initial.mass)) {
    double v = initial.mass.at(site);
    if (v < 0.0 || !std::isfinite(v)) throw ValidationError("initial masses must be finite and non-negative");
    if (site.x.size() != spec.dim || site.color < 0 || site.color >= spec.colors)
      throw ValidationError("initial site outside the model");
    cells[site].mass.add(v);
    initial_total += v;
  }
  std::vector<Site> start;
  for (auto& [site, cell] : cells)
    if (cell.mass.value() > spec.threshold(site.color) + kStabilitySlack) start.push_back(site);
  std::sort(start.begin(), start.end());
  if (shuffle) std::shuffle(start.begin(), start.end(), rng);
  for (const auto& s : start) {
    cells[s].queued = true;
    queue.push_back(s);
  }

  const double min_m = *std::min_element(spec.leakiness.begin(), spec.leakiness.end());
  const double min_rs = *std::min_element(spec.row_sums.begin(), spec.row_sums.end());
  const double cap = min_m > 1.0 ? 10.0 * initial_total / ((min_m - 1.0) * min_rs) + 10.0
                                 : options.topple_cap;

  StabilizeResult res;
  Accum leaked;
  leaked.add(initial.leaked_total);
  long long events = initial.topple_events;
  double singles = 0.0;
  std::vector<Site> fresh;

  while (!queue.empty()) {
    Site site = std::move(queue.front());
    queue.pop_front();
    Cell& cell = cells[site];
    cell.queued = false;
    const int i = site.color;
    const double M = spec.threshold(i);
    const double mass = cell.mass.value();
    const double k = topple_count(mass, M);
    if (k == 0.0) continue;

    cell.mass = Accum{};
    cell.mass.add(std::clamp(std::fma(-k, M, mass), 0.0, M));
    cell.topples += k;
    leaked.add(k * (M - spec.row_sum(i)));
    singles += k;
    ++events;
    if (singles > cap)
      throw NumericalError("toppling did not terminate within " + std::to_string(cap) +
                           " single topplings");

    fresh.clear();
    for (const auto& o : out[i]) {
      Site target{site.x + o.offset, o.to};
      Cell& c = cells[target];
      c.mass.add(k * o.weight);
      if (!c.queued && c.mass.value() > spec.threshold(o.to) + kStabilitySlack) {
        c.queued = true;
        fresh.push_back(std::move(target));
      }
    }
    if (shuffle) std::shuffle(fresh.begin(), fresh.end(), rng);
    for (auto& s : fresh) queue.push_back(std::move(s));
  }

  res.final.leaked_total = leaked.value();
  res.final.topple_events = events;
  res.single_topplings = singles;
  for (const auto& [site, cell] : cells) {
    double v = cell.mass.value();
    if (v > 0.0) res.final.mass[site] = v;
    if (cell.topples > 0.0) res.odometer[site] = cell.topples * spec.threshold(site.color);
  }
  return res;
}

bool is_stable(const ModelSpec& spec, const SandpileState& state) {
  for (const auto& [site, v] : state.mass)
    if (v > spec.threshold(site.color) + kStabilitySlack) return false;
  return true;
}

SiteSet shape(const Odometer& odo) {
  SiteSet s;
  for (const auto& [site, v] : odo)
    if (v > 0.0) s.insert(site);
  return s;
}

PointSet shape_projection(const Odometer& odo) {
  PointSet s;
  for (const auto& [site, v] : odo)
    if (v > 0.0) s.insert(site.x);
  return s;
}

SiteSet receive_closure(const ModelSpec& spec, const Odometer& odo) {
  const auto out = outgoing(spec);
  SiteSet s;
  for (const auto& [site, v] : odo) {
    if (!(v > 0.0)) continue;
    s.insert(site);
    for (const auto& o : out[site.color]) s.insert({site.x + o.offset, o.to});
  }
  return s;
}

SiteField apply_T(const ModelSpec& spec, const SiteField& field) {
  const auto out = outgoing(spec);
  SiteMap<Accum> acc;
  for (const auto& site : sorted_sites(field)) {
    const double v = field.at(site);
    if (v == 0.0) continue;
    acc[site].add(-v);
    const double scale = v / spec.threshold(site.color);
    for (const auto& o : out[site.color]) acc[{site.x + o.offset, o.to}].add(scale * o.weight);
  }
  SiteField res;
  res.reserve(acc.size());
  for (const auto& [site, a] : acc) res[site] = a.value();
  return res;
}

std::vector<RadialExtent> radial_extents(const PointSet& sites, const std::vector<VectorXd>& dirs,
                                         double tol_angle) {
  std::vector<RadialExtent> res(dirs.size());
  if (dirs.empty()) return res;
  const int d = static_cast<int>(dirs.front().size());
  double reach = 0.0;
  for (const auto& x : sites) reach = std::max(reach, to_real(x).norm());
  const int B = static_cast<int>(std::ceil(reach)) + 2;
  const double cos_tol = std::cos(tol_angle);
  const bool has_origin = sites.count(Point::Zero(d)) > 0;

  struct Probe {
    VectorXd unit;
    double norm;
    bool member;
  };
  std::vector<Probe> probes;
  Point x = Point::Constant(d, -B);
  while (true) {
    double n = to_real(x).norm();
    if (n > 0.0 && n <= B) probes.push_back({to_real(x) / n, n, sites.count(x) > 0});
    int a = 0;
    for (; a < d; ++a) {
      if (++x[a] <= B) break;
      x[a] = -B;
    }
    if (a == d) break;
  }

  for (std::size_t k = 0; k < dirs.size(); ++k) {
    const VectorXd& u = dirs[k];
    double outer = has_origin ? 0.0 : -1.0;
    double missing = std::numeric_limits<double>::infinity();
    for (const auto& p : probes) {
      if (p.unit.dot(u) < cos_tol) continue;
      if (p.member) outer = std::max(outer, p.norm);
      else missing = std::min(missing, p.norm);
    }
    if (outer < 0.0) continue;
    res[k].outer = outer;
    if (!has_origin) continue;
    double inner = 0.0;
    for (const auto& p : probes)
      if (p.member && p.norm < missing && p.unit.dot(u) >= cos_tol) inner = std::max(inner, p.norm);
    res[k].inner = inner;
  }
  return res;
}

void write_field_csv(std::ostream& out, const SiteField& field, int dim,
                     const std::string& value_name) {
  for (int a = 1; a <= dim; ++a) out << 'x' << a << ',';
  out << "color," << value_name << '\n';
  char buf[64];
  for (const auto& site : sorted_sites(field)) {
    for (int a = 0; a < dim; ++a) out << site.x[a] << ',';
    std::snprintf(buf, sizeof buf, "%.17g", field.at(site));
    out << site.color + 1 << ',' << buf << '\n';
  }
}

void write_slice_ppm(const std::string& path, const SiteField& field, int dim, int color,
                     int axis_a, int axis_b, const Point& fixed, double scale) {
  static constexpr std::array<std::array<int, 3>, 6> palette{
      {{255, 64, 64}, {64, 200, 64}, {64, 128, 255}, {255, 200, 32}, {200, 64, 255}, {32, 220, 220}}};
  auto on_plane = [&](const Site& s) {
    if (s.color != color) return false;
    for (int a = 0; a < dim; ++a)
      if (a != axis_a && a != axis_b && s.x[a] != fixed[a]) return false;
    return true;
  };
  int lo_a = 0, hi_a = 0, lo_b = 0, hi_b = 0;
  for (const auto& [s, v] : field) {
    if (!on_plane(s)) continue;
    lo_a = std::min(lo_a, s.x[axis_a]);
    hi_a = std::max(hi_a, s.x[axis_a]);
    if (axis_b >= 0) {
      lo_b = std::min(lo_b, s.x[axis_b]);
      hi_b = std::max(hi_b, s.x[axis_b]);
    }
  }
  const int w = hi_a - lo_a + 1, h = hi_b - lo_b + 1;
  std::vector<unsigned char> img(static_cast<std::size_t>(w) * h * 3, 0);
  const auto& rgb = palette[color % palette.size()];
  for (const auto& [s, v] : field) {
    if (!on_plane(s)) continue;
    int col = s.x[axis_a] - lo_a;
    int row = axis_b >= 0 ? hi_b - s.x[axis_b] : 0;
    double t = std::clamp(v / scale, 0.0, 1.0);
    for (int c = 0; c < 3; ++c)
      img[(static_cast<std::size_t>(row) * w + col) * 3 + c] = static_cast<unsigned char>(std::lround(t * rgb[c]));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "P6\n" << w << ' ' << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

}  // namespace lasm
