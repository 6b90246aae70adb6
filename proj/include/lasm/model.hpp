#pragma once

#include "lasm/lattice.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lasm {

/// One toppling weight c(offset, from, to).
struct TopplingEntry {
  Point offset;
  int from = 0;
  int to = 0;
  double weight = 0.0;
};

/// The toppling rule of a multicolor leaky sandpile on Z^d.
///
/// A site (x, i) is stable while its mass is at most threshold(i) = m_i * row_sum(i).
/// Toppling sends weight c(y, i, j) to (x + y, j) and loses (m_i - 1) * row_sum(i).
struct ModelSpec {
  int dim = 0;
  int colors = 0;
  std::vector<double> leakiness;
  std::vector<TopplingEntry> entries;

  // Derived by validate().
  std::vector<double> row_sums;
  std::vector<double> thresholds;

  double row_sum(int color) const { return row_sums.at(color); }
  double threshold(int color) const { return thresholds.at(color); }
  double min_threshold() const;
  double max_threshold() const;
  int max_offset_norm1() const;
};

/// Checks structure and fills the derived fields. Zero weights are dropped. Throws ValidationError.
void validate(ModelSpec& spec);

/// Builds and validates a spec in one go.
ModelSpec make_model(int dim, int colors, std::vector<double> leakiness,
                     std::vector<TopplingEntry> entries);

/// Parses the JSON model document. Throws ParseError or ValidationError.
ModelSpec load_model_spec(std::string_view text);
ModelSpec load_model_file(const std::string& path);

/// Serializes to the same document format; weights round-trip bit-exactly.
std::string emit_model_spec(const ModelSpec& spec);

/// Copy of `spec` with every color's leakiness set to `m`.
ModelSpec with_uniform_leakiness(const ModelSpec& spec, double m);

/// Copy of `spec` with one color's leakiness replaced.
ModelSpec with_leakiness(const ModelSpec& spec, int color, double m);

struct JumpEntry {
  Point offset;
  int from = 0;
  int to = 0;
  double prob = 0.0;
};

/// Sub-stochastic jump measures mu_{i,j}(x) of a Markov-additive walk on Z^d x colors.
struct JumpKernel {
  int dim = 0;
  int colors = 0;
  std::vector<JumpEntry> entries;
  std::vector<double> kill_prob;

  double row_mass(int color) const;
  int max_offset_norm1() const;
  int max_offset_inf() const;
  bool killed() const;
};

/// mu_{i,j}(x) = c(x,i,j) / (m_i row_sum(i)); kill probability 1 - 1/m_i.
JumpKernel krw_measure(const ModelSpec& spec);

/// The leak-free walk c(x,i,j) / row_sum(i), i.e. krw_measure with every m_i = 1.
JumpKernel conservative_kernel(const ModelSpec& spec);

/// Builds a kernel directly from probabilities; kill_prob is 1 - row mass.
JumpKernel make_kernel(int dim, int colors, std::vector<JumpEntry> entries);

/// A closed walk through distinct colors: colors[0] -> colors[1] -> ... -> colors[0].
struct ColorCycle {
  std::vector<int> colors;
  Point displacement;  // sum of the chosen offsets
  int length() const { return static_cast<int>(colors.size()); }
};

/// Every simple color cycle with every choice of offsets, deduplicated by averaged displacement.
/// Throws NumericalError once more than `cap` raw combinations would be generated.
std::vector<ColorCycle> simple_cycles(const JumpKernel& kernel, std::size_t cap = 2'000'000);

enum class Verdict { holds, fails, undetermined };

const char* to_string(Verdict v);

struct AssumptionReport {
  int horizon = 0;
  Verdict leaky = Verdict::undetermined;
  Verdict irreducible = Verdict::undetermined;
  Verdict aperiodic = Verdict::undetermined;
  Verdict finite_support = Verdict::holds;
  /// Generator of the return lengths group at (0, color); 0 when no return exists.
  long period = 0;

  bool all_hold() const {
    return leaky == Verdict::holds && irreducible == Verdict::holds &&
           aperiodic == Verdict::holds && finite_support == Verdict::holds;
  }
};

/// Default exploration horizon: 2 p (max offset 1-norm + 1).
int default_horizon(const JumpKernel& kernel);

/// Checks the standing assumptions on the walk.
///
/// Positive verdicts come from breadth-first exploration up to `horizon` steps, so they
/// can only appear (never disappear) as the horizon grows. Negative verdicts come from
/// exact lattice certificates (displacement group, cycle cone, return-length period).
/// Anything else is reported as undetermined.
AssumptionReport validate_assumptions(const JumpKernel& kernel, int horizon);

/// Integer Hermite normal form of the row lattice spanned by `rows` (upper echelon, positive pivots).
std::vector<std::vector<long long>> hermite_rows(std::vector<std::vector<long long>> rows);

}  // namespace lasm
