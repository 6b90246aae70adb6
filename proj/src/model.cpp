#include "lasm/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace lasm {

namespace {

using json = nlohmann::json;

std::string where(std::size_t k) { return "entries[" + std::to_string(k) + "]"; }

Point point_from_json(const json& j, int dim, std::size_t k) {
  if (!j.is_array()) throw ParseError(where(k) + ".offset: expected an array");
  if (static_cast<int>(j.size()) != dim)
    throw ValidationError(where(k) + ".offset: dimension mismatch (expected " +
                          std::to_string(dim) + ", got " + std::to_string(j.size()) + ")");
  Point p(dim);
  for (int a = 0; a < dim; ++a) {
    if (!j[a].is_number_integer()) throw ParseError(where(k) + ".offset: expected integers");
    p[a] = j[a].get<int>();
  }
  return p;
}

int color_from_json(const json& j, int colors, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field + ": expected an integer");
  long long c = j.get<long long>();
  if (c < 1 || c > colors)
    throw ValidationError(field + ": color " + std::to_string(c) + " outside 1.." +
                          std::to_string(colors));
  return static_cast<int>(c - 1);
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

using EntryKey = std::tuple<std::vector<int>, int, int>;

EntryKey key_of(const Point& x, int from, int to) {
  return {std::vector<int>(x.data(), x.data() + x.size()), from, to};
}

}  // namespace

double ModelSpec::min_threshold() const {
  return *std::min_element(thresholds.begin(), thresholds.end());
}

double ModelSpec::max_threshold() const {
  return *std::max_element(thresholds.begin(), thresholds.end());
}

int ModelSpec::max_offset_norm1() const {
  int r = 0;
  for (const auto& e : entries) r = std::max(r, norm1(e.offset));
  return r;
}

void validate(ModelSpec& spec) {
  if (spec.dim < 1 || spec.dim > kMaxDim)
    throw ValidationError("dimension must be in 1.." + std::to_string(kMaxDim));
  if (spec.colors < 1) throw ValidationError("colors must be positive");
  if (static_cast<int>(spec.leakiness.size()) != spec.colors)
    throw ValidationError("leakiness must list one value per color");
  for (int i = 0; i < spec.colors; ++i) {
    double m = spec.leakiness[i];
    if (!std::isfinite(m) || m < 1.0)
      throw ValidationError("leakiness of color " + std::to_string(i + 1) + " must be >= 1");
  }

  std::vector<TopplingEntry> kept;
  std::set<EntryKey> seen;
  for (std::size_t k = 0; k < spec.entries.size(); ++k) {
    const auto& e = spec.entries[k];
    if (e.offset.size() != spec.dim) throw ValidationError(where(k) + ": dimension mismatch");
    if (e.from < 0 || e.from >= spec.colors || e.to < 0 || e.to >= spec.colors)
      throw ValidationError(where(k) + ": color out of range");
    if (!std::isfinite(e.weight) || e.weight < 0.0)
      throw ValidationError(where(k) + ": negative weight");
    if (!seen.insert(key_of(e.offset, e.from, e.to)).second)
      throw ParseError(where(k) + ": duplicate (offset, from, to)");
    if (e.weight > 0.0) kept.push_back(e);
  }
  spec.entries = std::move(kept);

  spec.row_sums.assign(spec.colors, 0.0);
  for (const auto& e : spec.entries) spec.row_sums[e.from] += e.weight;
  spec.thresholds.resize(spec.colors);
  for (int i = 0; i < spec.colors; ++i) {
    if (!(spec.row_sums[i] > 0.0))
      throw ValidationError("empty toppling row for color " + std::to_string(i + 1));
    spec.thresholds[i] = spec.leakiness[i] * spec.row_sums[i];
  }
}

ModelSpec make_model(int dim, int colors, std::vector<double> leakiness,
                     std::vector<TopplingEntry> entries) {
  ModelSpec spec;
  spec.dim = dim;
  spec.colors = colors;
  spec.leakiness = std::move(leakiness);
  spec.entries = std::move(entries);
  validate(spec);
  return spec;
}

ModelSpec load_model_spec(std::string_view text) {
  // Track object keys per nesting level so repeated keys are rejected instead of overwritten.
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    if (ev == json::parse_event_t::object_start) {
      keys.emplace_back();
    } else if (ev == json::parse_event_t::object_end) {
      keys.pop_back();
    } else if (ev == json::parse_event_t::key) {
      if (!keys.back().insert(parsed.get<std::string>()).second && duplicate.empty())
        duplicate = parsed.get<std::string>();
    }
    return true;
  };

  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  if (!duplicate.empty()) throw ParseError("duplicate key \"" + duplicate + "\"");
  if (!doc.is_object()) throw ParseError("model document must be an object");

  ModelSpec spec;
  try {
    const json& d = require(doc, "dimension");
    const json& p = require(doc, "colors");
    if (!d.is_number_integer() || !p.is_number_integer())
      throw ParseError("\"dimension\" and \"colors\" must be integers");
    spec.dim = d.get<int>();
    spec.colors = p.get<int>();
    if (spec.dim < 1 || spec.dim > kMaxDim)
      throw ValidationError("dimension must be in 1.." + std::to_string(kMaxDim));
    if (spec.colors < 1) throw ValidationError("colors must be positive");

    const json& m = require(doc, "leakiness");
    if (!m.is_array()) throw ParseError("\"leakiness\" must be an array");
    for (const auto& v : m) {
      if (!v.is_number()) throw ParseError("\"leakiness\" must hold numbers");
      spec.leakiness.push_back(v.get<double>());
    }

    const json& entries = require(doc, "entries");
    if (!entries.is_array()) throw ParseError("\"entries\" must be an array");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const json& e = entries[k];
      if (!e.is_object()) throw ParseError(where(k) + ": expected an object");
      TopplingEntry t;
      t.offset = point_from_json(require(e, "offset"), spec.dim, k);
      t.from = color_from_json(require(e, "from"), spec.colors, where(k) + ".from");
      t.to = color_from_json(require(e, "to"), spec.colors, where(k) + ".to");
      const json& w = require(e, "weight");
      if (!w.is_number()) throw ParseError(where(k) + ".weight: expected a number");
      t.weight = w.get<double>();
      spec.entries.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  validate(spec);
  return spec;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model_spec(buf.str());
}

std::string emit_model_spec(const ModelSpec& spec) {
  json doc;
  doc["dimension"] = spec.dim;
  doc["colors"] = spec.colors;
  doc["leakiness"] = spec.leakiness;
  json entries = json::array();
  for (const auto& e : spec.entries) {
    json r;
    r["offset"] = std::vector<int>(e.offset.data(), e.offset.data() + e.offset.size());
    r["from"] = e.from + 1;
    r["to"] = e.to + 1;
    r["weight"] = e.weight;
    entries.push_back(std::move(r));
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

ModelSpec with_uniform_leakiness(const ModelSpec& spec, double m) {
  ModelSpec out = spec;
  std::fill(out.leakiness.begin(), out.leakiness.end(), m);
  validate(out);
  return out;
}

ModelSpec with_leakiness(const ModelSpec& spec, int color, double m) {
  if (color < 0 || color >= spec.colors)
    throw ValidationError("leakiness override: color out of range");
  ModelSpec out = spec;
  out.leakiness[color] = m;
  validate(out);
  return out;
}

double JumpKernel::row_mass(int color) const {
  double s = 0.0;
  for (const auto& e : entries)
    if (e.from == color) s += e.prob;
  return s;
}

int JumpKernel::max_offset_norm1() const {
  int r = 0;
  for (const auto& e : entries) r = std::max(r, norm1(e.offset));
  return r;
}

int JumpKernel::max_offset_inf() const {
  int r = 0;
  for (const auto& e : entries) r = std::max(r, norm_inf(e.offset));
  return r;
}

bool JumpKernel::killed() const {
  return std::any_of(kill_prob.begin(), kill_prob.end(), [](double q) { return q > 0.0; });
}

JumpKernel krw_measure(const ModelSpec& spec) {
  JumpKernel k;
  k.dim = spec.dim;
  k.colors = spec.colors;
  k.kill_prob.resize(spec.colors);
  for (int i = 0; i < spec.colors; ++i) k.kill_prob[i] = 1.0 - 1.0 / spec.leakiness[i];
  k.entries.reserve(spec.entries.size());
  for (const auto& e : spec.entries)
    k.entries.push_back({e.offset, e.from, e.to, e.weight / (spec.thresholds[e.from])});
  return k;
}

JumpKernel conservative_kernel(const ModelSpec& spec) {
  return krw_measure(with_uniform_leakiness(spec, 1.0));
}

JumpKernel make_kernel(int dim, int colors, std::vector<JumpEntry> entries) {
  JumpKernel k;
  k.dim = dim;
  k.colors = colors;
  k.entries = std::move(entries);
  k.kill_prob.assign(colors, 1.0);
  for (const auto& e : k.entries) {
    if (e.offset.size() != dim || e.from < 0 || e.from >= colors || e.to < 0 || e.to >= colors)
      throw ValidationError("jump entry out of range");
    if (!(e.prob > 0.0 && e.prob <= 1.0)) throw ValidationError("jump probability outside (0, 1]");
    k.kill_prob[e.from] -= e.prob;
  }
  for (auto& q : k.kill_prob) {
    if (q < -1e-12) throw ValidationError("jump measure row exceeds 1");
    q = std::max(q, 0.0);
    if (q < 1e-15) q = 0.0;
  }
  return k;
}

std::vector<ColorCycle> simple_cycles(const JumpKernel& kernel, std::size_t cap) {
  const int p = kernel.colors;
  std::vector<std::vector<std::vector<Point>>> steps(p, std::vector<std::vector<Point>>(p));
  for (const auto& e : kernel.entries) steps[e.from][e.to].push_back(e.offset);

  // Averaged displacements are compared exactly as displacement * (L / q) with L = lcm(1..p).
  long long lcm = 1;
  for (int q = 1; q <= p; ++q) lcm = std::lcm(lcm, static_cast<long long>(q));
  std::set<std::vector<long long>> seen;
  std::vector<ColorCycle> out;
  std::size_t produced = 0;

  std::vector<int> path;
  std::vector<char> used(p, 0);

  auto emit_offsets = [&](const std::vector<int>& cyc) {
    const int q = static_cast<int>(cyc.size());
    std::vector<std::size_t> idx(q, 0);
    while (true) {
      if (++produced > cap) throw NumericalError("cycle enumeration exceeded cap");
      Point sum = Point::Zero(kernel.dim);
      for (int s = 0; s < q; ++s) sum += steps[cyc[s]][cyc[(s + 1) % q]][idx[s]];
      std::vector<long long> key(kernel.dim);
      for (int a = 0; a < kernel.dim; ++a) key[a] = sum[a] * (lcm / q);
      if (seen.insert(key).second) out.push_back({cyc, sum});
      int s = 0;
      for (; s < q; ++s) {
        if (++idx[s] < steps[cyc[s]][cyc[(s + 1) % q]].size()) break;
        idx[s] = 0;
      }
      if (s == q) break;
    }
  };

  // Depth-first over paths whose first color is the smallest in the cycle.
  auto dfs = [&](auto&& self, int start, int cur) -> void {
    if (!steps[cur][start].empty()) {
      path.push_back(cur);
      emit_offsets(path);
      path.pop_back();
    }
    used[cur] = 1;
    path.push_back(cur);
    for (int nxt = start + 1; nxt < p; ++nxt)
      if (!used[nxt] && !steps[cur][nxt].empty()) self(self, start, nxt);
    path.pop_back();
    used[cur] = 0;
  };
  for (int s = 0; s < p; ++s) dfs(dfs, s, s);
  return out;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

int default_horizon(const JumpKernel& kernel) {
  return 2 * kernel.colors * (kernel.max_offset_norm1() + 1);
}

std::vector<std::vector<long long>> hermite_rows(std::vector<std::vector<long long>> rows) {
  if (rows.empty()) return rows;
  const std::size_t n = rows[0].size();
  std::size_t top = 0;
  for (std::size_t c = 0; c < n && top < rows.size(); ++c) {
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t r = top; r < rows.size(); ++r)
        if (rows[r][c] != 0 && (best == rows.size() || std::llabs(rows[r][c]) < std::llabs(rows[best][c])))
          best = r;
      if (best == rows.size()) break;
      std::swap(rows[top], rows[best]);
      bool clean = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        if (rows[r][c] == 0) continue;
        long long f = rows[r][c] / rows[top][c];
        for (std::size_t k = c; k < n; ++k) rows[r][k] -= f * rows[top][k];
        if (rows[r][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (rows[top][c] == 0) continue;
    if (rows[top][c] < 0)
      for (auto& v : rows[top]) v = -v;
    for (std::size_t r = 0; r < top; ++r) {
      long long f = rows[r][c] / rows[top][c];
      if (rows[r][c] - f * rows[top][c] < 0) --f;
      for (std::size_t k = c; k < n; ++k) rows[r][k] -= f * rows[top][k];
    }
    ++top;
  }
  rows.resize(top);
  return rows;
}

namespace {

long long det_bareiss(std::vector<std::vector<long long>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  long long sign = 1, prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[k], a[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        __int128 v = static_cast<__int128>(a[i][j]) * a[k][k] - static_cast<__int128>(a[i][k]) * a[k][j];
        a[i][j] = static_cast<long long>(v / prev);
      }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

int rank_of(const std::vector<Point>& pts, int dim) {
  std::vector<std::vector<long long>> rows;
  for (const auto& x : pts) rows.emplace_back(x.data(), x.data() + dim);
  return static_cast<int>(hermite_rows(rows).size());
}

// Exact test of cone(pts) == R^d. Returns undetermined when the subset count is too large.
Verdict cone_is_full(const std::vector<Point>& pts, int dim) {
  if (rank_of(pts, dim) < dim) return Verdict::fails;
  if (dim == 1) {
    bool pos = false, neg = false;
    for (const auto& x : pts) {
      if (x[0] > 0) pos = true;
      if (x[0] < 0) neg = true;
    }
    return pos && neg ? Verdict::holds : Verdict::fails;
  }
  const std::size_t n = pts.size(), r = static_cast<std::size_t>(dim - 1);
  double combos = 1.0;
  for (std::size_t k = 0; k < r; ++k) combos *= static_cast<double>(n - k) / static_cast<double>(k + 1);
  if (combos > 5e6) return Verdict::undetermined;

  // A proper cone has an extreme dual ray orthogonal to d-1 independent generators.
  std::vector<std::size_t> pick(r);
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<long long> w(dim);
    bool nonzero = false;
    for (int col = 0; col < dim; ++col) {
      std::vector<std::vector<long long>> minor(r, std::vector<long long>(r));
      for (std::size_t a = 0; a < r; ++a)
        for (int c = 0, cc = 0; c < dim; ++c)
          if (c != col) minor[a][cc++] = pts[pick[a]][c];
      w[col] = ((col % 2) ? -1 : 1) * det_bareiss(minor);
      nonzero |= w[col] != 0;
    }
    if (nonzero) {
      bool any_pos = false, any_neg = false;
      for (const auto& x : pts) {
        __int128 s = 0;
        for (int c = 0; c < dim; ++c) s += static_cast<__int128>(w[c]) * x[c];
        if (s > 0) any_pos = true;
        if (s < 0) any_neg = true;
      }
      if (!(any_pos && any_neg)) return Verdict::fails;
    }
    std::size_t k = r;
    while (k > 0 && pick[k - 1] == n - r + (k - 1)) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < r; ++j) pick[j] = pick[j - 1] + 1;
  }
  return Verdict::holds;
}

bool colors_strongly_connected(const JumpKernel& kernel) {
  const int p = kernel.colors;
  std::vector<std::vector<char>> reach(p, std::vector<char>(p, 0));
  for (int i = 0; i < p; ++i) reach[i][i] = 1;
  for (const auto& e : kernel.entries) reach[e.from][e.to] = 1;
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = 1;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (!reach[i][j]) return false;
  return true;
}

// Generators of the group of (displacement, length) over closed walks, via tree potentials.
std::vector<std::vector<long long>> closed_walk_generators(const JumpKernel& kernel) {
  const int p = kernel.colors, d = kernel.dim;
  std::vector<std::vector<long long>> pot(p);
  pot[0].assign(d + 1, 0);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : kernel.entries) {
      auto step = [&](int a, int b, int sign) {
        if (!pot[a].empty() && pot[b].empty()) {
          pot[b] = pot[a];
          for (int k = 0; k < d; ++k) pot[b][k] += sign * e.offset[k];
          pot[b][d] += sign;
          grew = true;
        }
      };
      step(e.from, e.to, 1);
      step(e.to, e.from, -1);
    }
  }
  std::vector<std::vector<long long>> gens;
  for (const auto& e : kernel.entries) {
    if (pot[e.from].empty() || pot[e.to].empty()) continue;
    std::vector<long long> g(d + 1);
    for (int k = 0; k < d; ++k) g[k] = e.offset[k] + pot[e.from][k] - pot[e.to][k];
    g[d] = 1 + pot[e.from][d] - pot[e.to][d];
    gens.push_back(std::move(g));
  }
  return gens;
}

struct Exploration {
  bool reach_all_colors = false;   // from color 0: every (0, j)
  bool reach_unit_steps = false;   // from color 0: every (+-e_k, 0)
  bool return_to_origin = true;    // from each color j: (0, 0)
  bool gcd_one = true;             // every color has return lengths with gcd 1
};

Exploration explore(const JumpKernel& kernel, int horizon) {
  const int d = kernel.dim, p = kernel.colors;
  Exploration ex;
  const int reach = std::max(1, horizon * std::max(1, kernel.max_offset_inf()));
  double cells = std::pow(2.0 * reach + 1.0, d) * p;
  int h = horizon;
  int rad = reach;
  if (cells > 4e7) {
    // Shrink the horizon to fit in memory; positive verdicts stay sound.
    rad = static_cast<int>((std::pow(4e7 / p, 1.0 / d) - 1.0) / 2.0);
    h = rad / std::max(1, kernel.max_offset_inf());
  }
  const long long side = 2LL * rad + 1;
  std::vector<long long> stride(d);
  long long total = 1;
  for (int a = 0; a < d; ++a) {
    stride[a] = total;
    total *= side;
  }
  auto index_of = [&](const Point& x, int color) {
    long long idx = 0;
    for (int a = 0; a < d; ++a) idx += (x[a] + rad) * stride[a];
    return idx * p + color;
  };
  const long long origin_cell = index_of(Point::Zero(d), 0) / p;
  std::vector<long long> jump(kernel.entries.size());
  for (std::size_t k = 0; k < kernel.entries.size(); ++k) {
    long long off = 0;
    for (int a = 0; a < d; ++a) off += kernel.entries[k].offset[a] * stride[a];
    jump[k] = off * p + (kernel.entries[k].to - kernel.entries[k].from);
  }
  std::vector<std::vector<int>> by_color(p);
  for (std::size_t k = 0; k < kernel.entries.size(); ++k) by_color[kernel.entries[k].from].push_back(static_cast<int>(k));

  std::vector<char> ever(total * p), mark(total * p);
  for (int start = 0; start < p; ++start) {
    std::fill(ever.begin(), ever.end(), 0);
    std::vector<long long> layer{origin_cell * p + start}, next;
    long long g = 0;
    for (int n = 1; n <= h; ++n) {
      next.clear();
      for (long long s : layer) {
        int c = static_cast<int>(s % p);
        for (int k : by_color[c]) {
          long long t = s + jump[k];
          if (!mark[t]) {
            mark[t] = 1;
            next.push_back(t);
          }
        }
      }
      for (long long t : next) {
        mark[t] = 0;
        ever[t] = 1;
        if (t == origin_cell * p + start) g = std::gcd(g, static_cast<long long>(n));
      }
      layer.swap(next);
    }
    if (g != 1) ex.gcd_one = false;
    if (!ever[origin_cell * p + 0] && start != 0) ex.return_to_origin = false;
    if (start == 0) {
      ex.reach_all_colors = true;
      for (int j = 1; j < p; ++j) ex.reach_all_colors &= ever[origin_cell * p + j] != 0;
      ex.reach_unit_steps = rad >= 1;
      for (int a = 0; a < d && ex.reach_unit_steps; ++a)
        for (int s : {-1, 1}) {
          Point x = Point::Zero(d);
          x[a] = s;
          ex.reach_unit_steps &= ever[index_of(x, 0)] != 0;
        }
    }
  }
  return ex;
}

}  // namespace

AssumptionReport validate_assumptions(const JumpKernel& kernel, int horizon) {
  if (horizon < 1) throw ValidationError("horizon must be positive");
  AssumptionReport rep;
  rep.horizon = horizon;
  rep.leaky = kernel.killed() ? Verdict::holds : Verdict::fails;
  rep.finite_support = Verdict::holds;

  const int d = kernel.dim;
  bool strongly = colors_strongly_connected(kernel);

  // Exact obstructions.
  bool irreducible_fails = !strongly;
  auto lattice = hermite_rows(closed_walk_generators(kernel));
  std::vector<std::vector<long long>> spatial;
  long long period = 0;
  for (const auto& row : lattice) {
    bool spatial_zero = std::all_of(row.begin(), row.begin() + d, [](long long v) { return v == 0; });
    if (spatial_zero) period = std::gcd(period, std::llabs(row[d]));
    else spatial.emplace_back(row.begin(), row.begin() + d);
  }
  auto spatial_hnf = hermite_rows(spatial);
  long long covolume = 1;
  if (static_cast<int>(spatial_hnf.size()) < d) {
    irreducible_fails = true;
  } else {
    for (int a = 0; a < d; ++a) covolume *= spatial_hnf[a][a];
    if (covolume != 1) irreducible_fails = true;
  }
  Verdict cone = Verdict::undetermined;
  if (!irreducible_fails) {
    try {
      std::vector<Point> sums;
      for (const auto& c : simple_cycles(kernel)) sums.push_back(c.displacement);
      cone = sums.empty() ? Verdict::fails : cone_is_full(sums, d);
    } catch (const NumericalError&) {
      cone = Verdict::undetermined;
    }
    if (cone == Verdict::fails) irreducible_fails = true;
  }
  rep.period = strongly ? period : 0;

  Exploration ex = explore(kernel, horizon);
  if (irreducible_fails) rep.irreducible = Verdict::fails;
  else if (ex.reach_all_colors && ex.reach_unit_steps && ex.return_to_origin)
    rep.irreducible = Verdict::holds;

  if (strongly && period != 1) rep.aperiodic = Verdict::fails;
  else if (ex.gcd_one) rep.aperiodic = Verdict::holds;
  return rep;
}

}  // namespace lasm
