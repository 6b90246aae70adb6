#pragma once

#include "lasm/lattice.hpp"
#include "lasm/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lasm {

/// Sparse sand configuration. Zero-mass sites may be absent.
struct SandpileState {
  SiteField mass;
  double leaked_total = 0.0;
  long long topple_events = 0;

  double total() const;
};

/// Emitted mass per site; always an integer multiple of the site threshold.
using Odometer = SiteField;

SandpileState point_source(int dim, int color, double n);

/// Number of single topplings that bring `mass` to at most `threshold` (mass == threshold is stable).
double topple_count(double mass, double threshold);

struct StabilizeOptions {
  std::uint64_t order_seed = 0;
  /// Cap on single topplings when some m_i == 1 and no a priori bound exists.
  double topple_cap = 1e12;
};

struct StabilizeResult {
  SandpileState final;
  Odometer odometer;
  double single_topplings = 0.0;
};

/// Runs the toppling rule to a stable configuration. Throws NumericalError on the
/// non-termination guard.
StabilizeResult stabilize(const ModelSpec& spec, const SandpileState& initial,
                          const StabilizeOptions& options = {});

inline constexpr double kStabilitySlack = 1e-9;

bool is_stable(const ModelSpec& spec, const SandpileState& state);

/// Sites that emitted mass.
SiteSet shape(const Odometer& odo);

/// Points of Z^d where some color emitted mass.
PointSet shape_projection(const Odometer& odo);

/// The shape together with every site it sends mass to.
SiteSet receive_closure(const ModelSpec& spec, const Odometer& odo);

/// (Tv)(x,i) = sum_{(y,j)} P((y,j) -> (x,i)) v(y,j) - v(x,i).
SiteField apply_T(const ModelSpec& spec, const SiteField& field);

struct RadialExtent {
  std::optional<double> inner;
  std::optional<double> outer;
};

/// Per-direction extents of a lattice set inside cones of half-angle `tol_angle`.
///
/// outer(u) is the largest norm of a member within the cone; inner(u) is the largest norm r
/// such that every lattice point of the cone with norm <= r is a member. The origin lies in
/// every cone. Directions whose cone holds no member get empty values.
std::vector<RadialExtent> radial_extents(const PointSet& sites, const std::vector<VectorXd>& dirs,
                                         double tol_angle);

/// Writes "x1..xd,color,<value_name>" rows sorted by site, colors 1-based, %.17g values.
void write_field_csv(std::ostream& out, const SiteField& field, int dim,
                     const std::string& value_name);

/// P6 image of one color of a field on the plane through the origin spanned by two axes,
/// with any remaining axes fixed by `fixed` (one entry per axis, ignored for the two free ones).
void write_slice_ppm(const std::string& path, const SiteField& field, int dim, int color,
                     int axis_a, int axis_b, const Point& fixed, double scale);

}  // namespace lasm
