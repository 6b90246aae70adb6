#include "lasm/cli.hpp"

#include "lasm/asymptotics.hpp"
#include "lasm/geometry.hpp"
#include "lasm/green.hpp"
#include "lasm/io.hpp"
#include "lasm/model.hpp"
#include "lasm/sandpile.hpp"
#include "lasm/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

namespace lasm {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string model_path;
  std::optional<double> m;
  std::vector<std::string> m_overrides;
  int threads = 0;
  std::string out_dir = ".";
  unsigned long long seed = 0;
  int color = 1;
  int dirs = 0;
};

struct Params {
  std::string n_list;
  std::string m_list;
  std::string step_list = "8,16,32,64";
  int horizon = 0;
  int box_r = 0;
  double eps_stop = 1e-20;
  double tol_angle = 0.08;
  std::string slice;
};

std::string num(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string full(double v) { return num(v, "%.17g"); }

// Loaded model plus run bookkeeping shared by all subcommands.
class Run {
 public:
  Run(std::string command, const Common& c, std::ostream& out)
      : command_(std::move(command)), c_(c), out_(out), start_(std::chrono::steady_clock::now()) {
    text_ = read_file(c.model_path);
    spec_ = load_model_spec(text_);
    if (c.m) spec_ = with_uniform_leakiness(spec_, *c.m);
    for (const auto& o : c.m_overrides) {
      auto [color, value] = parse_m_override(o);
      if (color >= spec_.colors) throw ValidationError("--m-override: color out of range");
      spec_ = with_leakiness(spec_, color, value);
    }
    if (c.color < 1 || c.color > spec_.colors) throw ValidationError("--color out of range");
    manifest_.add("command", command_);
    manifest_.add("model", c.model_path);
    manifest_.add("model_digest", fnv1a_hex(text_));
    for (int i = 0; i < spec_.colors; ++i) manifest_.add("m_" + std::to_string(i + 1), spec_.leakiness[i]);
    manifest_.add("threads", std::to_string(c.threads));
    manifest_.add("seed", std::to_string(c.seed));
  }

  const ModelSpec& spec() const { return spec_; }
  JumpKernel kernel() const { return krw_measure(spec_); }
  int source() const { return c_.color - 1; }
  std::ostream& out() { return out_; }
  RunManifest& manifest() { return manifest_; }

  int dir_count() const {
    if (c_.dirs > 0) return c_.dirs;
    return spec_.dim == 2 ? 720 : spec_.dim == 3 ? 2000 : 5000;
  }
  std::vector<VectorXd> dirs() {
    auto g = direction_grid(spec_.dim, dir_count(), c_.seed + 1);
    manifest_.add("directions", std::to_string(g.size()));
    return g;
  }

  std::string path(const std::string& name) {
    fs::create_directories(c_.out_dir);
    return (fs::path(c_.out_dir) / name).string();
  }
  /// Opens an output file and records it in the manifest.
  std::ofstream open(const std::string& name) {
    std::string p = path(name);
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p);
    outputs_.push_back(p);
    return f;
  }
  void record(const std::string& name) { outputs_.push_back(path(name)); }

  void add_topples(long long n) { topple_events_ += n; }

  void finish() {
    for (const auto& p : outputs_) {
      if (!fs::exists(p)) throw std::runtime_error("missing output " + p);
      manifest_.add("output", p);
    }
    manifest_.add("topple_events", std::to_string(topple_events_));
    manifest_.add("wall_clock_s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    std::string p = path("manifest");
    write_file(p, manifest_.str());
    out_ << "manifest: " << p << "\n";
  }

 private:
  std::string command_;
  Common c_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point start_;
  std::string text_;
  ModelSpec spec_;
  RunManifest manifest_;
  std::vector<std::string> outputs_;
  long long topple_events_ = 0;
};

std::vector<double> n_values(const std::string& text, const char* flag) {
  if (text.empty()) throw ValidationError(std::string(flag) + " is required");
  auto v = parse_real_list(text);
  for (double n : v)
    if (!(n > 0) || !std::isfinite(n)) throw ValidationError(std::string(flag) + " values must be positive and finite");
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + full(x);
  return s;
}

void write_point_row(std::ostream& f, const VectorXd& x) {
  for (Eigen::Index a = 0; a < x.size(); ++a) f << (a ? "," : "") << full(x[a]);
}

void dir_header(std::ostream& f, int dim) {
  for (int a = 1; a <= dim; ++a) f << ",u_" << a;
}

// Green tables for every source color and the threshold constants, sized for n_max.
struct GreenSetup {
  std::vector<GreenTable> tables;
  Thresholds th;
  int box_r = 0;
};

GreenSetup green_setup(Run& run, const JumpKernel& k, double n_max, double gamma_min, const Params& p) {
  GreenSetup g;
  g.box_r = p.box_r > 0 ? p.box_r : default_box_radius(std::max(n_max, 1.0), run.spec().min_threshold(), gamma_min);
  for (int c = 0; c < k.colors; ++c) g.tables.push_back(green_table(k, c, g.box_r, p.eps_stop));
  g.th = threshold_constants(run.spec(), g.tables);
  run.manifest().add("box_R", std::to_string(g.box_r));
  run.manifest().add("eps_stop", p.eps_stop);
  run.manifest().add("alpha", g.th.alpha);
  run.manifest().add("beta", g.th.beta);
  return g;
}

int cmd_validate(Run& run, const Params& p) {
  JumpKernel k = run.kernel();
  const int h = p.horizon > 0 ? p.horizon : default_horizon(k);
  AssumptionReport r = validate_assumptions(k, h);
  const bool any_fail = r.leaky == Verdict::fails || r.irreducible == Verdict::fails ||
                        r.aperiodic == Verdict::fails || r.finite_support == Verdict::fails;
  const char* overall = r.all_hold() ? "hold" : any_fail ? "fail" : "undetermined";
  auto& o = run.out();
  o << "assumptions: " << overall << " (horizon " << h << ")\n";
  o << "  leaky: " << to_string(r.leaky) << "\n";
  o << "  irreducible: " << to_string(r.irreducible) << "\n";
  o << "  aperiodic: " << to_string(r.aperiodic) << " (period " << r.period << ")\n";
  o << "  finite_support: " << to_string(r.finite_support) << "\n";
  for (int i = 0; i < run.spec().colors; ++i)
    o << "  threshold M_" << i + 1 << " = " << num(run.spec().threshold(i)) << "\n";
  run.manifest().add("horizon", std::to_string(h));
  run.manifest().add("verdict", overall);
  run.finish();
  return 0;
}

StabilizeResult simulate(Run& run, double n, unsigned long long seed) {
  StabilizeOptions opt;
  opt.order_seed = seed;
  StabilizeResult r = stabilize(run.spec(), point_source(run.spec().dim, run.source(), n), opt);
  run.add_topples(r.final.topple_events);
  return r;
}

int cmd_simulate(Run& run, const Params& p, unsigned long long seed) {
  auto ns = n_values(p.n_list, "--N");
  if (ns.size() != 1) throw ValidationError("simulate takes a single --N");
  const double n = ns.front();
  run.manifest().add("N", n);
  StabilizeResult r = simulate(run, n, seed);
  {
    auto f = run.open("final.csv");
    write_field_csv(f, r.final.mass, run.spec().dim, "mass");
  }
  {
    auto f = run.open("odometer.csv");
    write_field_csv(f, r.odometer, run.spec().dim, "odometer");
  }
  auto& o = run.out();
  o << "N = " << num(n) << "\n";
  o << "toppled sites: " << shape(r.odometer).size() << "\n";
  o << "topple events: " << r.final.topple_events << " (single topplings " << num(r.single_topplings) << ")\n";
  o << "leaked: " << num(r.final.leaked_total) << ", remaining: " << num(r.final.total()) << "\n";
  run.finish();
  return 0;
}

int cmd_shape(Run& run, int threads) {
  JumpKernel k = run.kernel();
  auto dirs = run.dirs();
  ShapeCurve c = limit_shape(k, dirs, threads);
  {
    auto f = run.open("shape.csv");
    write_shape_csv(f, c);
  }
  std::vector<SupportPoint> pts;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    SupportPoint sp;
    sp.u = dirs[i];
    sp.h = c.gamma[i];
    sp.t = c.t[i];
    pts.push_back(sp);
  }
  {
    auto f = run.open("boundary.csv");
    write_boundary_csv(f, pts);
  }
  auto [lo, hi] = std::minmax_element(c.radius.begin(), c.radius.end());
  run.out() << "limit shape radii: min " << num(*lo) << ", max " << num(*hi) << " over " << dirs.size()
            << " directions\n";
  run.finish();
  return 0;
}

int cmd_predict(Run& run, const Params& p, int threads) {
  JumpKernel k = run.kernel();
  auto ns = n_values(p.n_list, "--N");
  run.manifest().add("N", join(ns));
  auto dirs = run.dirs();
  ShapeCurve c = limit_shape(k, dirs, threads);
  GreenSetup g = green_setup(run, k, *std::max_element(ns.begin(), ns.end()),
                             *std::min_element(c.gamma.begin(), c.gamma.end()), p);
  auto f = run.open("predict.csv");
  f << "N";
  dir_header(f, k.dim);
  f << ",inner,outer,limit\n";
  auto& o = run.out();
  o << "alpha = " << num(g.th.alpha) << ", beta = " << num(g.th.beta) << ", box_R = " << g.box_r << "\n";
  o << "N            max|R/logN - 1/gamma|  max(R - r)\n";
  for (double n : ns) {
    double worst = 0, gap = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      Radii r = radii(g.tables[run.source()], dirs[i], n, g.th.alpha, g.th.beta, run.source());
      f << full(n) << ',';
      write_point_row(f, dirs[i]);
      f << ',' << full(r.inner) << ',' << full(r.outer) << ',' << full(std::log(n) * c.radius[i]) << "\n";
      worst = std::max(worst, std::abs(r.outer / std::log(n) - c.radius[i]));
      gap = std::max(gap, r.outer - r.inner);
    }
    char line[128];
    std::snprintf(line, sizeof line, "%-12.4g %-22.6g %.6g\n", n, worst, gap);
    o << line;
  }
  f.close();
  run.finish();
  return 0;
}

int cmd_compare(Run& run, const Params& p, int threads, unsigned long long seed) {
  JumpKernel k = run.kernel();
  auto ns = n_values(p.n_list, "--N");
  run.manifest().add("N", join(ns));
  run.manifest().add("tol_angle", p.tol_angle);
  auto dirs = run.dirs();
  ShapeCurve c = limit_shape(k, dirs, threads);
  GreenSetup g = green_setup(run, k, *std::max_element(ns.begin(), ns.end()),
                             *std::min_element(c.gamma.begin(), c.gamma.end()), p);
  auto f = run.open("compare.csv");
  f << "N";
  dir_header(f, k.dim);
  f << ",inner,outer,limit\n";
  auto& o = run.out();
  o << "N            max|outer/logN - 1/gamma|  max rel. error  sandwich\n";
  bool all_ok = true;
  for (double n : ns) {
    StabilizeResult r = simulate(run, n, seed);
    auto ext = radial_extents(shape_projection(r.odometer), dirs, p.tol_angle);
    double worst = 0, rel = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const double outer = ext[i].outer.value_or(0.0), inner = ext[i].inner.value_or(0.0);
      f << full(n) << ',';
      write_point_row(f, dirs[i]);
      f << ',' << full(inner) << ',' << full(outer) << ',' << full(std::log(n) * c.radius[i]) << "\n";
      worst = std::max(worst, std::abs(outer / std::log(n) - c.radius[i]));
      rel = std::max(rel, std::abs(outer / std::log(n) / c.radius[i] - 1.0));
    }
    SandwichReport s = sandwich_check(g.tables[run.source()], r.odometer, n, g.th.alpha, g.th.beta);
    all_ok = all_ok && s.ok();
    char line[256];
    std::snprintf(line, sizeof line, "%-12.4g %-26.6g %-15.4f %s (missing %lld, extra %lld, outside box %lld)\n", n,
                  worst, rel, s.ok() ? "ok" : "VIOLATED", s.missing_inner, s.extra_outer, s.outside_box);
    o << line;
  }
  f.close();
  run.manifest().add("sandwich", all_ok ? "ok" : "violated");
  run.finish();
  return 0;
}

int cmd_polytope(Run& run, const Params& p, int threads) {
  JumpKernel k = run.kernel();
  auto cps = cycle_points(k);
  auto xs = points_of(cps);
  {
    auto f = run.open("cycle_points.csv");
    for (int a = 1; a <= k.dim; ++a) f << (a > 1 ? "," : "") << "x_" << a;
    f << ",length\n";
    for (const auto& cp : cps) {
      write_point_row(f, cp.point);
      f << ',' << cp.length() << "\n";
    }
  }
  Polytope hull = convex_hull(xs);
  {
    auto f = run.open("polytope.csv");
    write_vertices_csv(f, hull.vertices);
  }
  auto& o = run.out();
  o << "cycle points: " << xs.size() << ", hull vertices: " << hull.vertices.size() << ", facets: "
    << hull.facets.size() << "\n";
  auto ms = n_values(p.m_list.empty() ? "1e4,1e6,1e8" : p.m_list, "--m-list");
  run.manifest().add("m_list", join(ms));
  auto dirs = run.dirs();
  auto f = run.open("regime.csv");
  f << "m,hausdorff\n";
  o << "m            d_H((log m) C, conv X)\n";
  for (double m : ms) {
    if (!(m > 1)) throw ValidationError("--m-list values must exceed 1");
    ShapeCurve c = limit_shape(krw_measure(with_uniform_leakiness(run.spec(), m)), dirs, threads);
    const double h = hausdorff_convex(c.boundary(std::log(m)), xs, dirs);
    f << full(m) << ',' << full(h) << "\n";
    char line[96];
    std::snprintf(line, sizeof line, "%-12.4g %.6g\n", m, h);
    o << line;
  }
  f.close();
  run.finish();
  return 0;
}

int cmd_ellipsoid(Run& run, const Params& p, int threads) {
  Ellipsoid e = zero_leak_ellipsoid(conservative_kernel(run.spec()));
  {
    auto f = run.open("ellipsoid.csv");
    for (Eigen::Index i = 0; i < e.a.rows(); ++i) {
      for (Eigen::Index j = 0; j < e.a.cols(); ++j) f << (j ? "," : "") << full(e.a(i, j));
      f << "\n";
    }
  }
  auto ms = n_values(p.m_list.empty() ? "1.01,1.001,1.0001" : p.m_list, "--m-list");
  run.manifest().add("m_list", join(ms));
  auto dirs = run.dirs();
  StarBody target = sample_star(e, dirs);
  auto& o = run.out();
  o << "A = 2 sigma^{-1}:\n" << e.a << "\n";
  auto f = run.open("regime.csv");
  f << "m,spherical_gap\n";
  o << "m            sup_u |sqrt(m-1) r_m(u) - r_E(u)|\n";
  for (double m : ms) {
    if (!(m > 1)) throw ValidationError("--m-list values must exceed 1");
    ShapeCurve c = limit_shape(krw_measure(with_uniform_leakiness(run.spec(), m)), dirs, threads);
    StarBody s = c.star();
    for (double& r : s.radius) r *= std::sqrt(m - 1.0);
    const double gap = spherical_gap(s, target);
    f << full(m) << ',' << full(gap) << "\n";
    char line[96];
    std::snprintf(line, sizeof line, "%-12.6g %.6g\n", m, gap);
    o << line;
  }
  f.close();
  run.finish();
  return 0;
}

int cmd_first_passage(Run& run, const Params& p) {
  JumpKernel k = run.kernel();
  auto steps = parse_int_list(p.step_list);
  run.manifest().add("n_list", p.step_list);
  Polytope hull = convex_hull(points_of(cycle_points(k)));
  const bool measurable = !hull.degenerate && k.dim <= 3;
  auto& o = run.out();
  o << "n        sites      d_H(conv X, A_n / n)\n";
  auto f = run.open("first_passage.csv");
  f << "n,sites,hausdorff\n";
  FirstPassage last;
  for (int n : steps) {
    last = first_passage_set(k, n);
    const double h = measurable ? hausdorff_polytope_points(hull, last.points, 1.0 / (2.0 * n)) : std::nan("");
    f << n << ',' << last.sites.size() << ',' << full(h) << "\n";
    char line[96];
    std::snprintf(line, sizeof line, "%-8d %-10zu %.6g\n", n, last.sites.size(), h);
    o << line;
  }
  f.close();
  {
    auto g = run.open("first_passage_sites.csv");
    for (int a = 1; a <= k.dim; ++a) g << "x" << a << ',';
    g << "color\n";
    for (const auto& s : last.sites) {
      for (int a = 0; a < k.dim; ++a) g << s.x[a] << ',';
      g << s.color + 1 << "\n";
    }
  }
  run.finish();
  return 0;
}

int cmd_render(Run& run, const Params& p, int threads, unsigned long long seed) {
  auto ns = n_values(p.n_list, "--N");
  if (ns.size() != 1) throw ValidationError("render takes a single --N");
  const double n = ns.front();
  const int d = run.spec().dim;
  run.manifest().add("N", n);
  StabilizeResult r = simulate(run, n, seed);
  int axis_a = 0, axis_b = d >= 2 ? 1 : -1;
  Point fixed = Point::Zero(d);
  if (!p.slice.empty()) {
    if (d != 3) throw ValidationError("--slice applies to d = 3");
    auto [axis, value] = parse_slice(p.slice);
    if (axis >= d) throw ValidationError("--slice axis out of range");
    fixed[axis] = value;
    std::vector<int> free;
    for (int a = 0; a < d; ++a)
      if (a != axis) free.push_back(a);
    axis_a = free[0];
    axis_b = free[1];
  } else if (d == 3) {
    axis_a = 0;
    axis_b = 1;
  } else if (d > 3) {
    throw ValidationError("render supports d <= 3");
  }
  if (!p.slice.empty()) run.manifest().add("slice", p.slice);
  for (int c = 0; c < run.spec().colors; ++c) {
    const std::string name = "final_color" + std::to_string(c + 1) + ".ppm";
    write_slice_ppm(run.path(name), r.final.mass, d, c, axis_a, axis_b, fixed, run.spec().threshold(c));
    run.record(name);
  }
  if (d == 2) {
    ShapeCurve c = limit_shape(run.kernel(), run.dirs(), threads);
    SvgLayer limit{"limit", "#1f4e9c", c.boundary(std::log(n)), true, false};
    SvgLayer sim{"shape", "#d62728", {}, false, true};
    for (const auto& x : shape_projection(r.odometer)) sim.points.push_back(to_real(x));
    std::sort(sim.points.begin(), sim.points.end(), [](const VectorXd& a, const VectorXd& b) {
      return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    write_svg(run.path("overlay.svg"), {sim, limit});
    run.record("overlay.svg");
  }
  run.out() << "rendered N = " << num(n) << "\n";
  run.finish();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multicolor leaky Abelian sandpile: simulation and limit shapes", "lasm"};
  app.require_subcommand(1);
  Common common;
  Params params;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("model", common.model_path, "Model spec file")->required();
    sub->add_option("--m", common.m, "Set every color's leakiness");
    sub->add_option("--m-override", common.m_overrides, "color:value leakiness override (1-based color)");
    sub->add_option("--threads", common.threads, "Worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--seed", common.seed, "Toppling-order and direction seed");
    sub->add_option("--color", common.color, "Source color (1-based)");
    sub->add_option("--dirs", common.dirs, "Direction grid size")->check(CLI::PositiveNumber);
  };
  auto green_flags = [&](CLI::App* sub) {
    sub->add_option("--box-R", params.box_r, "Green box radius (0 = automatic)")->check(CLI::NonNegativeNumber);
    sub->add_option("--eps-stop", params.eps_stop, "Green series stop level")->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<CLI::App*, std::function<int(Run&)>>> commands;
  auto sub = [&](const char* name, const char* help, std::function<int(Run&)> body) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s);
    commands.emplace_back(s, std::move(body));
    return s;
  };

  sub("validate", "Check the standing assumptions", [&](Run& r) { return cmd_validate(r, params); })
      ->add_option("--horizon", params.horizon, "Exploration horizon (0 = default)");
  sub("simulate", "Stabilize N chips at the origin", [&](Run& r) { return cmd_simulate(r, params, common.seed); })
      ->add_option("--N", params.n_list, "Initial mass")
      ->required();
  sub("shape", "Sample the limit shape", [&](Run& r) { return cmd_shape(r, common.threads); });
  auto* predict = sub("predict", "Green-function radii", [&](Run& r) { return cmd_predict(r, params, common.threads); });
  predict->add_option("--N", params.n_list, "Comma-separated masses")->required();
  green_flags(predict);
  auto* compare = sub("compare", "Simulation against the limit shape and the threshold sandwich",
                      [&](Run& r) { return cmd_compare(r, params, common.threads, common.seed); });
  compare->add_option("--N", params.n_list, "Comma-separated masses")->required();
  compare->add_option("--tol-angle", params.tol_angle, "Cone half-angle for radial extents");
  green_flags(compare);
  sub("polytope", "Large-leak limit polytope", [&](Run& r) { return cmd_polytope(r, params, common.threads); })
      ->add_option("--m-list", params.m_list, "Comma-separated leakiness values");
  sub("ellipsoid", "Small-leak limit ellipsoid", [&](Run& r) { return cmd_ellipsoid(r, params, common.threads); })
      ->add_option("--m-list", params.m_list, "Comma-separated leakiness values");
  sub("first-passage", "First-passage sets A_n", [&](Run& r) { return cmd_first_passage(r, params); })
      ->add_option("--n", params.step_list, "Comma-separated step counts");
  auto* render = sub("render", "PPM slices and SVG overlays",
                     [&](Run& r) { return cmd_render(r, params, common.threads, common.seed); });
  render->add_option("--N", params.n_list, "Initial mass")->required();
  render->add_option("--slice", params.slice, "axis=value slice for d = 3 (1-based axis)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  for (auto& [s, body] : commands) {
    if (!s->parsed()) continue;
    try {
      Run run(s->get_name(), common, out);
      return body(run);
    } catch (const ParseError& e) {
      err << "parse error: " << e.what() << "\n";
      return 2;
    } catch (const ValidationError& e) {
      err << "validation error: " << e.what() << "\n";
      return 2;
    } catch (const NumericalError& e) {
      err << "numerical error: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  err << app.help();
  return 2;
}

}  // namespace lasm
