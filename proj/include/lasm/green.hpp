#pragma once

#include "lasm/lattice.hpp"
#include "lasm/model.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace lasm {

/// G((0, source), (x, j)) for ||x||_inf <= radius, accumulated until the surviving mass drops
/// below eps_stop.
struct GreenTable {
  int dim = 0;
  int colors = 0;
  int source = 0;
  int radius = 0;
  double eps_stop = 0.0;
  int steps = 0;                  // number of convolution terms accumulated
  double tail_bound = 0.0;        // surviving mass at the stop
  double tail_occupation = 0.0;   // expected occupation after the stop, summed over all sites
  double total_occupation = 0.0;  // expected occupation over all sites and times (space-free)
  std::vector<double> values;     // (2R+1)^d cells x colors

  bool contains(const Point& x) const;
  double at(const Point& x, int color) const;
  /// Sum of stored values of one color.
  double color_sum(int color) const;
};

/// Memory guard on grid cells (cells x colors).
inline constexpr double kGreenCellLimit = 2e8;

/// Builds the table by repeated lattice convolution. The dynamics run on a window large
/// enough that mass can still return to the storage box before the stop.
GreenTable green_table(const JumpKernel& kernel, int source, int box_radius, double eps_stop);

/// Tent-weighted extension sum_y theta(||x-y||_inf) G(y) / sum_y theta(||x-y||_inf).
double green_interp(const GreenTable& table, const VectorXd& x, int color);

struct Thresholds {
  double alpha = 0.0;
  double beta = 0.0;
  double sup_occupation = 0.0;  // max_i sum_j sum_z G((0,j),(z,i)) incl. the unstored remainder
};

/// beta = min_i M_i; alpha = max_i M_i * sup of G^T 1, from one table per source color.
/// Throws NumericalError if a table stores less than 99% of its occupation.
Thresholds threshold_constants(const ModelSpec& spec, const std::vector<GreenTable>& tables);

struct Radii {
  double inner = 0.0;  // r_{N,u}
  double outer = 0.0;  // R_{N,u}
};

/// r = inf{g_u <= alpha/N}, R = sup{g_u >= beta/N} on the interpolated g_u(r) = G~(r u, j).
/// Scan step 0.25, bisection to 1e-6. Throws NumericalError when a threshold is not resolved
/// inside the table.
Radii radii(const GreenTable& table, const VectorXd& u, double n, double alpha, double beta, int color);

/// Box radius ceil(log(n_max / beta) / gamma_min) + 10.
int default_box_radius(double n_max, double beta, double gamma_min);

/// (G^T v)(x,i) = sum_{(y,j)} v(y,j) G((0,j),(x-y,i)), evaluated where every x - y lies in the box.
SiteField green_transpose_apply(const std::vector<GreenTable>& tables, const SiteField& v);

struct SandwichReport {
  long long checked = 0;           // stored sites compared
  long long missing_inner = 0;     // G > alpha/N + slack but the site never emitted
  long long extra_outer = 0;       // the site emitted but G < beta/N - slack
  long long outside_box = 0;       // emitting sites beyond the stored box
  double slack = 0.0;              // tail_occupation of the table
  bool ok() const { return missing_inner == 0 && extra_outer == 0 && outside_box == 0; }
};

/// Compares the emitting sites of an odometer started from N at (0, table.source) with the
/// threshold levels alpha/N and beta/N of the stored Green function.
SandwichReport sandwich_check(const GreenTable& table, const SiteField& odometer, double n,
                              double alpha, double beta);

/// "x_1..x_d,color,value" rows of the stored box.
void write_green_csv(std::ostream& out, const GreenTable& table);

}  // namespace lasm
