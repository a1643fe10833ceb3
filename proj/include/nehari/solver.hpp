#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nehari/functional.hpp"

namespace nehari {

struct SolveOptions {
  int max_iters = 20000;
  /// Stop when ‖tangent gradient‖ ≤ grad_tol · ‖iterate‖ (H¹ norms).
  double grad_tol = 1e-7;
  double armijo_slope = 1e-4;
  double backtrack = 0.5;
  bool positivity_enforced = true;
  /// Optimize u on the single-equation Nehari set with v frozen at 0.
  bool single_component = false;
  /// Largest Lagrange multiplier accepted at convergence.
  double multiplier_tol = 1e-4;
  std::uint64_t seed = 0;

  /// Throws DomainError on out-of-range parameters.
  void validate() const;

  bool operator==(const SolveOptions&) const = default;
};

struct SolveResult {
  PairState pair;
  double energy = 0.0;
  double grad_norm = 0.0;       // relative tangent gradient norm
  double full_grad_norm = 0.0;  // relative full gradient norm
  double mult_f = 0.0;
  double mult_h = 0.0;
  int iterations = 0;
  bool converged = false;
  NehariResiduals residuals;
  std::vector<double> energy_history;  // accepted energies, nonincreasing
  std::string status;
};

/// Limit-problem counterpart of SolveResult; `w` is the sign-changing profile.
struct LimitResult {
  ReducedProfile w;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::pair<double, double> residuals{0.0, 0.0};
  std::vector<double> energy_history;
  std::string status;
};

/// Called with every accepted iterate (after projection) and its index.
using PairObserver = std::function<void(const PairState&, int)>;
using LimitObserver = std::function<void(const ReducedProfile&, int)>;

/// Minimizes E on the discrete invariant Nehari set: optional absolute
/// values, projection with nehari_project, Armijo step along the negative
/// tangent gradient with re-projection, stop on the relative tangent
/// gradient and the multiplier check.
/// Throws CollapseError when a component vanishes.
SolveResult minimize_nehari(const PairState& init, const CouplingParams& cp,
                            const ReducedGrid& grid, const SolveOptions& opts,
                            const PairObserver& observer = {});

/// Minimizes J over the set where w⁺ and w⁻ are both single-equation
/// Nehari points; w⁺, w⁻ are rescaled separately after each step.
LimitResult minimize_limit(const ReducedProfile& init_w, const CouplingParams& cp,
                           const ReducedGrid& grid, const SolveOptions& opts,
                           const LimitObserver& observer = {});

enum class InitKind { bumps, constants_split, random };

InitKind parse_init_kind(const std::string& s);
std::string to_string(InitKind k);

/// Deterministic initial pair. `bumps` are smooth caps around θ = 0 (u)
/// and θ = π/2 (v) with disjoint supports; `random` is a modulated split at
/// a seed-dependent angle.
PairState initial_guess(InitKind kind, const ReducedGrid& grid, std::uint64_t seed = 0);

}  // namespace nehari
