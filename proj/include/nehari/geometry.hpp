#pragma once

#include <span>
#include <vector>

#include "nehari/kernels.hpp"

namespace nehari {

/// Sphere-side function sampled on the arc grid, one value per node.
using ReducedProfile = std::vector<double>;

/// Dimension N, orbit split (m, n) with m + n = N + 1, and cell count M.
///
/// The group O(m) x O(n) acts on S^N ⊂ R^m x R^n; its orbits are
/// S^{m-1}(cos θ) x S^{n-1}(sin θ) for θ in [0, π/2].
struct ModelParams {
  int N = 4;
  int m = 2;
  int n = 3;
  int M = 2048;

  /// Critical exponent 2N/(N-2).
  double crit() const { return 2.0 * N / (N - 2.0); }
  /// Mass coefficient N(N-2)/4 of the conformal Laplacian.
  double kappa() const { return N * (N - 2.0) / 4.0; }
  /// Throws DomainError unless N≥4, m,n≥2, m+n=N+1, M≥16.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

/// |S^k| = 2π^{(k+1)/2} / Γ((k+1)/2).
double sphere_area(int k);

/// Volume of the orbit through arc parameter θ:
/// |S^{m-1}| |S^{n-1}| cos^{m-1}θ sin^{n-1}θ.
double orbit_weight(double theta, const ModelParams& params);

/// Best Sobolev constant, Talenti form πN(N-2)(Γ(N/2)/Γ(N))^{2/N}.
double sobolev_constant(int N);

/// Same constant through the sphere: S = (N(N-2)/4) |S^N|^{2/N}.
double sobolev_constant_sphere(int N);

/// Uniform arc grid with P1 finite-element weights.
///
/// Nodes θ_i = iπ/(2M), i = 0..M. Nodal weights are q_i = ∫ w φ_i dθ with
/// φ_i the hat functions; cell weights are k_c = (∫_c w dθ)/h². Both are
/// integrated with Gauss-Legendre per cell, so Σ q_i = |S^N| to roundoff.
/// The H¹ form is the weighted P1 stiffness plus lumped mass κ Σ q u v.
class ReducedGrid {
 public:
  explicit ReducedGrid(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  std::size_t size() const { return nodes_.size(); }
  int cells() const { return params_.M; }
  double spacing() const { return h_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> cell_weights() const { return cell_weights_; }

  /// Orbit weight sampled at the nodes (for output only).
  std::span<const double> orbit_weights() const { return orbit_; }

  /// Kernel backend used by the integrals on this grid.
  kernels::Exec exec() const { return exec_; }
  void set_exec(kernels::Exec e) { exec_ = e; }

  /// y = A x where A is the matrix of h1_form.
  void apply_h1(std::span<const double> x, std::span<double> y) const;
  /// Solves A x = b in place (b holds x on return).
  void solve_h1(std::span<double> b) const;

 private:
  ModelParams params_;
  double h_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> cell_weights_;
  std::vector<double> orbit_;
  // LDLᵀ factors of the tridiagonal H¹ matrix.
  std::vector<double> diag_;
  std::vector<double> off_;
  std::vector<double> ldl_d_;
  std::vector<double> ldl_l_;
  kernels::Exec exec_ = kernels::Exec::serial;
};

/// Throws DimensionError unless the profile has one value per node.
void check_profile(const ReducedProfile& f, const ReducedGrid& grid);

/// ∫ f w dθ, the S^N integral of the invariant extension of f.
double integrate(const ReducedProfile& f, const ReducedGrid& grid);

/// ∫ (u1' u2' + N(N-2)/4 u1 u2) w dθ. Equals the plane-side Dirichlet
/// integral when u1 = u2.
double h1_form(const ReducedProfile& u1, const ReducedProfile& u2, const ReducedGrid& grid);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace nehari
