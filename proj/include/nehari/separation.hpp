#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nehari/solver.hpp"

namespace nehari {

/// Diagnostics of one continuation step.
struct SweepRecord {
  double lambda = 0.0;
  double energy = 0.0;          // c_λ
  double overlap = 0.0;         // ∫|u|^α|v|^β
  double lambda_overlap = 0.0;  // -λ · overlap
  std::optional<double> interface_theta;
  double max_product = 0.0;     // max_i u_i v_i
  int iters = 0;
  double grad_norm = 0.0;
  bool converged = false;
  bool failed = false;          // no usable iterate (collapse or bad input)
  std::string status;
};

/// Strictly decreasing negative λ values.
struct SweepSchedule {
  std::vector<double> lambdas;

  /// Throws DomainError unless nonempty, strictly decreasing and negative.
  void validate() const;
  /// `count` points spaced geometrically from `first` to `last` (both < 0).
  static SweepSchedule geometric(double first, double last, int count);
};

/// The λ → -∞ endpoint: minimize_limit warm-started from u - v.
struct LimitRow {
  double energy = 0.0;  // c_∞
  double grad_norm = 0.0;
  int iters = 0;
  bool converged = false;
  std::optional<double> interface_theta;
  ReducedProfile w;
  std::string status;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;
  std::optional<LimitRow> limit;
  std::optional<PairState> last_pair;  // warm start for the next λ
};

/// Where to pick up an interrupted sweep: the records already computed and
/// the pair to warm-start the next λ from.
struct SweepResume {
  std::vector<SweepRecord> records;
  PairState warm;
};

/// Called after each finished record with the iterate that will warm-start
/// the next λ (absent if the sweep has produced none yet).
using SweepObserver = std::function<void(const SweepRecord&, const std::optional<PairState>&)>;

struct SweepHooks {
  SweepObserver on_record;
  /// Forwarded to every minimize_nehari call, tagged with the λ index.
  std::function<void(std::size_t, const PairState&, int)> on_iterate;
};

/// λ-continuation. The first λ starts from the bumps initial guess, later
/// ones from the previous minimizer; a failed λ leaves the warm start
/// unchanged and is marked in its record. The limit problem runs last,
/// from u - v of the final iterate.
SweepOutcome sweep_lambda(const SweepSchedule& schedule, const CouplingParams& cp_base,
                          const ReducedGrid& grid, const SolveOptions& opts,
                          const std::optional<SweepResume>& resume = {},
                          const SweepHooks& hooks = {});

SweepRecord make_record(const PairState& pair, const CouplingParams& cp,
                        const ReducedGrid& grid);

/// The unique sign change of w, by linear interpolation between the
/// bracketing nodes. Values with |w| ≤ 1e-12·max|w| count as zero.
/// Throws TopologyError unless there is exactly one crossing.
double interface_locate(const ReducedProfile& w, const ReducedGrid& grid);
/// Crossing of u - v.
double interface_locate(const PairState& pair, const ReducedGrid& grid);

/// Number of sign changes of w (same zero threshold as interface_locate).
int count_crossings(const ReducedProfile& w);

/// Sign-pattern checks on a limit profile.
struct ToriReport {
  int crossings = 0;
  bool positive_arc = false;    // {w > 0} is one interval touching an endpoint
  bool negative_arc = false;
  bool complementary = false;   // the two arcs meet at a single θ₀
  std::optional<double> theta0;
  /// "positive" or "negative": the part whose arc contains θ = 0.
  std::string touches_zero;
  bool pass() const { return crossings == 1 && positive_arc && negative_arc && complementary; }
};

ToriReport verify_tori(const ReducedProfile& w, const ReducedGrid& grid);

}  // namespace nehari
