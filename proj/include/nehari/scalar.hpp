#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nehari/kernels.hpp"

namespace nehari {

using kernels::Exec;

/// Synchronized ansatz (su, tu): (s, t) solves
///   1 = μ₁ s^{2*-2} + λα s^{α-2} t^β,
///   1 = μ₂ t^{2*-2} + λβ s^α t^{β-2}.
struct SyncInstance {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double alpha = 2.0;
  double beta = 2.0;
  double lambda = -0.25;
  int N = 4;

  /// Same rules as CouplingParams with λ < 0. Throws DomainError.
  void validate() const;
  double crit() const { return 2.0 * N / (N - 2.0); }
};

struct SyncPoint {
  double s = 0.0;
  double t = 0.0;
};

struct SyncOptions {
  double box_lo = 1e-3;
  double box_hi = 1e3;
  int starts_per_axis = 24;  // log-spaced Newton starts
  double dedup = 1e-8;       // relative distance in (s, t)
  double residual_tol = 1e-10;
  Exec exec = Exec::serial;
};

/// Residuals of both equations, each divided by 1 + the sum of the
/// absolute values of its terms.
std::pair<double, double> sync_residuals(const SyncInstance& inst, SyncPoint p);

/// All positive solutions in the box, sorted by (s, t).
std::vector<SyncPoint> sync_solve(const SyncInstance& inst, const SyncOptions& opts = {});

/// `lower` has no synchronized solution, `upper` has one; upper - lower ≤ width.
struct ThresholdBracket {
  double lower = 0.0;
  double upper = 0.0;
  double lambda_star() const { return 0.5 * (lower + upper); }
};

/// Bisection on λ ∈ [-1e6, -1e-6] for the emptiness of sync_solve.
/// Throws BracketError if the endpoints do not bracket a change.
ThresholdBracket sync_threshold(double mu1, double mu2, double alpha, double beta, int N,
                                double width = 1e-9, const SyncOptions& opts = {});

/// Independent oracle: residuals sampled on a points × points log grid over
/// the box; a cell counts when both bilinear interpolants share a zero in it.
/// Returns the number of such cells.
long sync_brute_scan(const SyncInstance& inst, int points = 1000, const SyncOptions& opts = {});

/// True iff λ ≤ -μ/α, which rules out (u, -u) on the Nehari set.
bool fixed_point_free(double mu, double alpha, double lambda);

/// e(s,t) = a₁s² + a₂t² - b₁s^p - b₂t^p + d s^α t^β.
struct PlaneCoeffs {
  double a1 = 1.0, a2 = 1.0;
  double b1 = 1.0, b2 = 1.0;
  double d = 1.0;
  double p = 4.0;
  double alpha = 2.0, beta = 2.0;

  /// Positivity, p > 2, α, β > 1, α + β = p. Throws DomainError.
  void validate() const;
  /// (2a₁ - pb₁ + dα, 2a₂ - pb₂ + dβ); both vanish iff (1,1) is critical.
  std::pair<double, double> constraint_residuals() const;

  double e(double s, double t) const;
  double es(double s, double t) const;
  double et(double s, double t) const;
  double ess(double s, double t) const;
  double est(double s, double t) const;
  double ett(double s, double t) const;
};

/// b₁ = (2a₁ + dα)/p, b₂ = (2a₂ + dβ)/p.
PlaneCoeffs plane_coeffs(double a1, double a2, double d, double p, double alpha, double beta);

struct PlaneBox {
  double r = 0.0;
  double R = 0.0;
  double delta = 0.0;
};

/// Extremes of the edge derivatives of e on `points` samples per edge.
struct BoxCheck {
  double lower_min = 0.0;  // min of e_s(r,·), e_t(·,r)
  double upper_max = 0.0;  // max of e_s(R,·), e_t(·,R)
  bool ok() const { return lower_min > 0.0 && upper_max <= -1.0; }
};
BoxCheck plane_box_check(const PlaneCoeffs& c, double r, double R, int points = 1000);

/// Searches r = 2^{-k}, R = 2^{k} inside [1e-6, 1e6]. Throws DomainError on
/// failure.
PlaneBox plane_box(const PlaneCoeffs& c, int points = 1000);

enum class CriticalKind { strict_max, strict_min, saddle, degenerate };
std::string to_string(CriticalKind k);

struct PlaneCritical {
  double s = 0.0;
  double t = 0.0;
  CriticalKind kind = CriticalKind::degenerate;
};

struct PlaneReport {
  PlaneBox box;
  std::vector<PlaneCritical> points;
  bool all_strict_max = false;
  /// all_strict_max and the list is exactly {(1,1)}.
  bool unique_at_one = false;
  /// e(1,1) ≥ e on the verification grid over the box.
  bool global_max = false;
  double grid_max = 0.0;
};

/// Multi-start Newton on ∇e from a starts × starts grid over the box,
/// deduplicated and classified by the closed-form Hessian.
PlaneReport plane_critical_points(const PlaneCoeffs& c, int starts = 200,
                                  int verify_points = 1000, Exec exec = Exec::serial);

}  // namespace nehari
