#pragma once

#include <cstdint>
#include <utility>

#include "nehari/geometry.hpp"

namespace nehari {

/// Coefficients of the coupled system
///   -Δu = μ₁|u|^{2*-2}u + λα|u|^{α-2}|v|^β u,
///   -Δv = μ₂|v|^{2*-2}v + λβ|u|^α|v|^{β-2} v.
struct CouplingParams {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double alpha = 2.0;
  double beta = 2.0;
  double lambda = -1.0;

  /// μᵢ > 0, α, β ∈ (1, 2], α + β = 2* (1e-12), and λ < 0 when
  /// `competitive` (λ ≤ 0 otherwise). Throws DomainError.
  void validate(int N, bool competitive = true) const;

  bool operator==(const CouplingParams&) const = default;
};

/// Optimization variable: a pair of reduced profiles on one grid.
struct PairState {
  ReducedProfile u;
  ReducedProfile v;
};

struct NehariResiduals {
  double f_val = 0.0;
  double h_val = 0.0;
};

/// Positive scaling factors (s, t).
struct Scaling {
  double s = 1.0;
  double t = 1.0;
};

/// The five integrals that determine E(su, tv) for every s, t > 0.
struct PairIntegrals {
  double grad_u = 0.0;   // h1_form(u, u)
  double grad_v = 0.0;   // h1_form(v, v)
  double crit_u = 0.0;   // ∫|u|^{2*}
  double crit_v = 0.0;   // ∫|v|^{2*}
  double coupling = 0.0; // ∫|u|^α|v|^β

  /// Integrals of (su, tv), by homogeneity.
  PairIntegrals scaled(Scaling st, const CouplingParams& cp, double crit) const;
};

/// Projection Jacobian (a_ij) at a point of the Nehari set:
/// a11 = (2-2*)μ₁∫|u|^{2*} + λα(2-α)C, a12 = -λαβC,
/// a22 = (2-2*)μ₂∫|v|^{2*} + λβ(2-β)C.
struct NehariJacobian {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
  double det() const { return a11 * a22 - a12 * a12; }
};

void check_pair(const PairState& pair, const ReducedGrid& grid);

/// ⟨a, b⟩ in the product H¹ inner product.
double pair_inner(const PairState& a, const PairState& b, const ReducedGrid& grid);
double pair_norm(const PairState& a, const ReducedGrid& grid);

PairIntegrals pair_integrals(const PairState& pair, const CouplingParams& cp,
                             const ReducedGrid& grid);

/// E(su, tv) from precomputed integrals.
double energy_from(const PairIntegrals& I, const CouplingParams& cp, double crit, Scaling st = {});
/// (f, h)(su, tv) from precomputed integrals.
NehariResiduals residuals_from(const PairIntegrals& I, const CouplingParams& cp, double crit,
                               Scaling st = {});

/// E(u,v) = ½(‖u‖² + ‖v‖²) - (1/2*)∫(μ₁|u|^{2*} + μ₂|v|^{2*}) - λ∫|u|^α|v|^β.
double energy(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid);

/// f = ∂_u E(u,v)u and h = ∂_v E(u,v)v.
NehariResiduals residuals(const PairState& pair, const CouplingParams& cp,
                          const ReducedGrid& grid);

/// H¹ Riesz representative of the derivative of the discrete energy.
PairState gradient(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid);

/// H¹ Riesz representatives of the derivatives of f and h.
std::pair<PairState, PairState> constraint_gradients(const PairState& pair,
                                                     const CouplingParams& cp,
                                                     const ReducedGrid& grid);

struct NewtonOptions {
  int max_iters = 100;
  double tol = 1e-13;  // on residuals relative to h1_form
};

/// Unique (s, t) with (su, tv) on the Nehari set. Newton in (log s, log t)
/// from the decoupled closed forms, with backtracking on the residual.
/// Throws DegenerateError for zero components and ConvergenceError.
Scaling nehari_project(const PairIntegrals& I, const CouplingParams& cp, int N,
                       const NewtonOptions& opts = {});
Scaling nehari_project(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid,
                       const NewtonOptions& opts = {});

/// s with s^{2*-2} = ‖u‖² / (μ∫|u|^{2*}).
double single_project(const ReducedProfile& u, double mu, const ReducedGrid& grid);

NehariJacobian nehari_jacobian(const PairIntegrals& I, const CouplingParams& cp, double crit);

/// (2*-2) c₀ αβ (-λ) ∫|u|^α|v|^β with c₀ = min μᵢ^{-(N-2)/2} S^{N/2}.
double nehari_det_bound(const PairIntegrals& I, const CouplingParams& cp, int N);

/// μ^{-(N-2)/2} S^{N/2}: lower bound for ‖u‖² on the Nehari set.
double nehari_norm_bound(double mu, int N);

/// Consistency checks at a point of the Nehari set.
struct NehariCheck {
  double energy_identity = 0.0;  // |E - (1/N)(‖u‖² + ‖v‖²)| / |E|
  double norm_ratio_u = 0.0;     // ‖u‖² / nehari_norm_bound(μ₁)
  double norm_ratio_v = 0.0;
  double det = 0.0;
  double det_bound = 0.0;
  /// Largest relative gain max(E(s'u, t'v) - E(u, v)) / |E| over the samples.
  double max_gain = 0.0;

  bool energy_ok() const { return energy_identity <= 1e-8; }
  bool bounds_ok() const { return norm_ratio_u >= 0.99 && norm_ratio_v >= 0.99; }
  bool det_ok() const { return det >= 0.99 * det_bound && det > 0.0; }
  bool max_ok() const { return max_gain <= 1e-12; }
  bool ok() const { return energy_ok() && bounds_ok() && det_ok() && max_ok(); }
};

/// Evaluates NehariCheck; (s', t') are drawn log-uniformly from
/// [e^{-3}, e^{3}]² with a generator seeded by `seed`.
NehariCheck check_nehari_point(const PairState& pair, const CouplingParams& cp,
                               const ReducedGrid& grid, std::uint64_t seed = 0,
                               int samples = 100);

/// Gradient split against the constraint directions.
struct TangentSplit {
  PairState tangent;  // gradient minus its projection on span{∇f, ∇h}
  PairState full;     // gradient
  PairState grad_f;
  PairState grad_h;
  double gram[3] = {0.0, 0.0, 0.0};  // ⟨∇f,∇f⟩, ⟨∇f,∇h⟩, ⟨∇h,∇h⟩
  double mult_f = 0.0;
  double mult_h = 0.0;
};

TangentSplit tangent_split(const PairState& pair, const CouplingParams& cp,
                           const ReducedGrid& grid);

/// ∇E minus its H¹ projection on span{∇f, ∇h}. Throws DegenerateError
/// when the Gram matrix is singular.
PairState tangent_gradient(const PairState& pair, const CouplingParams& cp,
                           const ReducedGrid& grid);

// Single-equation functional ½‖u‖² - (μ/2*)∫|u|^{2*}.
double single_energy(const ReducedProfile& u, double mu, const ReducedGrid& grid);
double single_residual(const ReducedProfile& u, double mu, const ReducedGrid& grid);
ReducedProfile single_gradient(const ReducedProfile& u, double mu, const ReducedGrid& grid);
ReducedProfile single_constraint_gradient(const ReducedProfile& u, double mu,
                                          const ReducedGrid& grid);

/// J(w) = ½‖w‖² - (1/2*)∫(μ₁|w⁺|^{2*} + μ₂|w⁻|^{2*}).
double limit_energy(const ReducedProfile& w, const CouplingParams& cp, const ReducedGrid& grid);

/// Single-component Nehari residuals of w⁺ and w⁻.
std::pair<double, double> limit_residuals(const ReducedProfile& w, const CouplingParams& cp,
                                          const ReducedGrid& grid);

ReducedProfile limit_gradient(const ReducedProfile& w, const CouplingParams& cp,
                              const ReducedGrid& grid);
/// Riesz gradients of the two limit residuals (one-sided at w = 0).
std::pair<ReducedProfile, ReducedProfile> limit_constraint_gradients(const ReducedProfile& w,
                                                                     const CouplingParams& cp,
                                                                     const ReducedGrid& grid);

ReducedProfile positive_part(const ReducedProfile& w);
ReducedProfile negative_part(const ReducedProfile& w);

}  // namespace nehari
