#include "nehari/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nehari/errors.hpp"

namespace nehari {

void ModelParams::validate() const {
  if (N < 4) throw DomainError("ModelParams: N must be >= 4, got " + std::to_string(N));
  if (m < 2 || n < 2) throw DomainError("ModelParams: m and n must be >= 2");
  if (m + n != N + 1) throw DomainError("ModelParams: m + n must equal N + 1");
  if (M < 16) throw DomainError("ModelParams: M must be >= 16, got " + std::to_string(M));
}

double sphere_area(int k) {
  if (k < 1) throw DomainError("sphere_area: k must be >= 1, got " + std::to_string(k));
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace {

double orbit_constant(const ModelParams& p) { return sphere_area(p.m - 1) * sphere_area(p.n - 1); }

double int_pow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

}  // namespace

double orbit_weight(double theta, const ModelParams& params) {
  constexpr double half_pi = std::numbers::pi / 2;
  if (!(theta >= 0.0 && theta <= half_pi))
    throw DomainError("orbit_weight: theta outside [0, pi/2]");
  // cos θ = sin(π/2 - θ); evaluating both factors as sines keeps the
  // reflection θ ↦ π/2 - θ, (m, n) ↦ (n, m) symmetric to roundoff.
  return orbit_constant(params) * int_pow(std::sin(half_pi - theta), params.m - 1) *
         int_pow(std::sin(theta), params.n - 1);
}

double sobolev_constant(int N) {
  if (N < 3) throw DomainError("sobolev_constant: N must be >= 3");
  const double ratio = std::tgamma(0.5 * N) / std::tgamma(static_cast<double>(N));
  return std::numbers::pi * N * (N - 2.0) * std::pow(ratio, 2.0 / N);
}

double sobolev_constant_sphere(int N) {
  if (N < 3) throw DomainError("sobolev_constant_sphere: N must be >= 3");
  return N * (N - 2.0) / 4.0 * std::pow(sphere_area(N), 2.0 / N);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

ReducedGrid::ReducedGrid(const ModelParams& params) : params_(params) {
  params_.validate();
  const int M = params_.M;
  constexpr double half_pi = std::numbers::pi / 2;
  h_ = half_pi / M;

  const auto nn = static_cast<std::size_t>(M + 1);
  nodes_.resize(nn);
  orbit_.resize(nn);
  for (int i = 0; i <= M; ++i) {
    // Mirror the upper half so that θ_{M-i} = π/2 - θ_i exactly.
    nodes_[static_cast<std::size_t>(i)] = (2 * i <= M) ? i * h_ : half_pi - (M - i) * h_;
  }
  nodes_.front() = 0.0;
  nodes_.back() = half_pi;
  for (std::size_t i = 0; i < nn; ++i) orbit_[i] = orbit_weight(nodes_[i], params_);

  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  const double c = orbit_constant(params_);
  weights_.assign(nn, 0.0);
  cell_weights_.assign(static_cast<std::size_t>(M), 0.0);
  for (int cell = 0; cell < M; ++cell) {
    double total = 0.0, left = 0.0, right = 0.0;
    for (std::size_t j = 0; j < gx.size(); ++j) {
      const double xi = 0.5 * (1.0 + gx[j]);  // position within the cell, [0, 1]
      // Distances to both arc endpoints, computed without cancellation.
      const double a = (cell + xi) * h_;
      const double b = (M - cell - xi) * h_;
      const double wq = 0.5 * gw[j] * h_ * c * int_pow(std::sin(b), params_.m - 1) *
                        int_pow(std::sin(a), params_.n - 1);
      total += wq;
      left += wq * (1.0 - xi);
      right += wq * xi;
    }
    cell_weights_[static_cast<std::size_t>(cell)] = total / (h_ * h_);
    weights_[static_cast<std::size_t>(cell)] += left;
    weights_[static_cast<std::size_t>(cell) + 1] += right;
  }
  if (params_.m == params_.n) {
    for (std::size_t i = 0; i < nn / 2; ++i) {
      const double avg = 0.5 * (weights_[i] + weights_[nn - 1 - i]);
      weights_[i] = weights_[nn - 1 - i] = avg;
    }
    const std::size_t nc = cell_weights_.size();
    for (std::size_t i = 0; i < nc / 2; ++i) {
      const double avg = 0.5 * (cell_weights_[i] + cell_weights_[nc - 1 - i]);
      cell_weights_[i] = cell_weights_[nc - 1 - i] = avg;
    }
  }

  // Tridiagonal H¹ matrix and its LDLᵀ factorization.
  const double kappa = params_.kappa();
  diag_.assign(nn, 0.0);
  off_.assign(nn - 1, 0.0);
  for (std::size_t i = 0; i < nn; ++i) diag_[i] = kappa * weights_[i];
  for (std::size_t cl = 0; cl + 1 < nn; ++cl) {
    diag_[cl] += cell_weights_[cl];
    diag_[cl + 1] += cell_weights_[cl];
    off_[cl] = -cell_weights_[cl];
  }
  ldl_d_.assign(nn, 0.0);
  ldl_l_.assign(nn - 1, 0.0);
  ldl_d_[0] = diag_[0];
  for (std::size_t i = 1; i < nn; ++i) {
    ldl_l_[i - 1] = off_[i - 1] / ldl_d_[i - 1];
    ldl_d_[i] = diag_[i] - ldl_l_[i - 1] * off_[i - 1];
    if (!(ldl_d_[i] > 0.0)) throw Error("ReducedGrid: H1 matrix is not positive definite");
  }
}

void ReducedGrid::apply_h1(std::span<const double> x, std::span<double> y) const {
  const std::size_t nn = diag_.size();
  for (std::size_t i = 0; i < nn; ++i) {
    double s = diag_[i] * x[i];
    if (i > 0) s += off_[i - 1] * x[i - 1];
    if (i + 1 < nn) s += off_[i] * x[i + 1];
    y[i] = s;
  }
}

void ReducedGrid::solve_h1(std::span<double> b) const {
  const std::size_t nn = diag_.size();
  for (std::size_t i = 1; i < nn; ++i) b[i] -= ldl_l_[i - 1] * b[i - 1];
  for (std::size_t i = 0; i < nn; ++i) b[i] /= ldl_d_[i];
  for (std::size_t i = nn - 1; i-- > 0;) b[i] -= ldl_l_[i] * b[i + 1];
}

void check_profile(const ReducedProfile& f, const ReducedGrid& grid) {
  if (f.size() != grid.size())
    throw DimensionError("profile has " + std::to_string(f.size()) + " values, grid has " +
                         std::to_string(grid.size()) + " nodes");
}

double integrate(const ReducedProfile& f, const ReducedGrid& grid) {
  check_profile(f, grid);
  return kernels::weighted_sum(grid.exec(), grid.weights(), f);
}

double h1_form(const ReducedProfile& u1, const ReducedProfile& u2, const ReducedGrid& grid) {
  check_profile(u1, grid);
  check_profile(u2, grid);
  return kernels::cell_form(grid.exec(), grid.cell_weights(), u1, u2) +
         grid.params().kappa() * kernels::weighted_dot(grid.exec(), grid.weights(), u1, u2);
}

}  // namespace nehari
