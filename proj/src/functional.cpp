#include "nehari/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nehari/errors.hpp"

namespace nehari {
namespace {

using kernels::abs_pow;

// |x|^{p-2} x, defined as 0 at x = 0.
double signed_pow(double x, double p) {
  if (x == 0.0) return 0.0;
  const double a = abs_pow(x, p - 1.0);
  return x > 0.0 ? a : -a;
}

ReducedProfile riesz(ReducedProfile rhs, const ReducedGrid& grid) {
  grid.solve_h1(rhs);
  return rhs;
}

double inner(const ReducedProfile& a, const ReducedProfile& b, const ReducedGrid& grid) {
  return h1_form(a, b, grid);
}

}  // namespace

void CouplingParams::validate(int N, bool competitive) const {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) throw DomainError("CouplingParams: mu1, mu2 must be > 0");
  if (!(alpha > 1.0 && alpha <= 2.0) || !(beta > 1.0 && beta <= 2.0))
    throw DomainError("CouplingParams: alpha, beta must lie in (1, 2]");
  const double crit = 2.0 * N / (N - 2.0);
  if (std::fabs(alpha + beta - crit) > 1e-12)
    throw DomainError("CouplingParams: alpha + beta must equal 2N/(N-2)");
  if (!std::isfinite(lambda)) throw DomainError("CouplingParams: lambda must be finite");
  if (competitive && !(lambda < 0.0))
    throw DomainError("CouplingParams: competitive runs need lambda < 0");
  if (!competitive && lambda > 0.0) throw DomainError("CouplingParams: lambda must be <= 0");
}

PairIntegrals PairIntegrals::scaled(Scaling st, const CouplingParams& cp, double crit) const {
  PairIntegrals out;
  out.grad_u = st.s * st.s * grad_u;
  out.grad_v = st.t * st.t * grad_v;
  out.crit_u = std::pow(st.s, crit) * crit_u;
  out.crit_v = std::pow(st.t, crit) * crit_v;
  out.coupling = std::pow(st.s, cp.alpha) * std::pow(st.t, cp.beta) * coupling;
  return out;
}

void check_pair(const PairState& pair, const ReducedGrid& grid) {
  check_profile(pair.u, grid);
  check_profile(pair.v, grid);
}

double pair_inner(const PairState& a, const PairState& b, const ReducedGrid& grid) {
  return inner(a.u, b.u, grid) + inner(a.v, b.v, grid);
}

double pair_norm(const PairState& a, const ReducedGrid& grid) {
  return std::sqrt(std::max(0.0, pair_inner(a, a, grid)));
}

PairIntegrals pair_integrals(const PairState& pair, const CouplingParams& cp,
                             const ReducedGrid& grid) {
  check_pair(pair, grid);
  const double crit = grid.params().crit();
  const auto sums = kernels::power_sums(grid.exec(), grid.weights(), pair.u, pair.v, crit,
                                        cp.alpha, cp.beta);
  PairIntegrals I;
  I.grad_u = h1_form(pair.u, pair.u, grid);
  I.grad_v = h1_form(pair.v, pair.v, grid);
  I.crit_u = sums.u_crit;
  I.crit_v = sums.v_crit;
  I.coupling = sums.coupling;
  return I;
}

double energy_from(const PairIntegrals& I0, const CouplingParams& cp, double crit, Scaling st) {
  const PairIntegrals I = I0.scaled(st, cp, crit);
  return 0.5 * (I.grad_u + I.grad_v) - (cp.mu1 * I.crit_u + cp.mu2 * I.crit_v) / crit -
         cp.lambda * I.coupling;
}

NehariResiduals residuals_from(const PairIntegrals& I0, const CouplingParams& cp, double crit,
                               Scaling st) {
  const PairIntegrals I = I0.scaled(st, cp, crit);
  return {I.grad_u - cp.mu1 * I.crit_u - cp.lambda * cp.alpha * I.coupling,
          I.grad_v - cp.mu2 * I.crit_v - cp.lambda * cp.beta * I.coupling};
}

double energy(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid) {
  return energy_from(pair_integrals(pair, cp, grid), cp, grid.params().crit());
}

NehariResiduals residuals(const PairState& pair, const CouplingParams& cp,
                          const ReducedGrid& grid) {
  return residuals_from(pair_integrals(pair, cp, grid), cp, grid.params().crit());
}

PairState gradient(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid) {
  check_pair(pair, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  const std::size_t n = grid.size();
  ReducedProfile ru(n), rv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = pair.u[i], v = pair.v[i];
    const double au = abs_pow(u, cp.alpha), bv = abs_pow(v, cp.beta);
    ru[i] = q[i] * (cp.mu1 * signed_pow(u, crit) + cp.lambda * cp.alpha * signed_pow(u, cp.alpha) * bv);
    rv[i] = q[i] * (cp.mu2 * signed_pow(v, crit) + cp.lambda * cp.beta * au * signed_pow(v, cp.beta));
  }
  // A⁻¹(Au - r) = u - A⁻¹r.
  grid.solve_h1(ru);
  grid.solve_h1(rv);
  PairState g{pair.u, pair.v};
  for (std::size_t i = 0; i < n; ++i) {
    g.u[i] -= ru[i];
    g.v[i] -= rv[i];
  }
  return g;
}

std::pair<PairState, PairState> constraint_gradients(const PairState& pair,
                                                     const CouplingParams& cp,
                                                     const ReducedGrid& grid) {
  check_pair(pair, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  const std::size_t n = grid.size();
  const double la = cp.lambda, a = cp.alpha, b = cp.beta;
  ReducedProfile fu(n), fv(n), hu(n), hv(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = pair.u[i], v = pair.v[i];
    const double su = signed_pow(u, a), sv = signed_pow(v, b);
    const double au = abs_pow(u, a), bv = abs_pow(v, b);
    fu[i] = q[i] * (crit * cp.mu1 * signed_pow(u, crit) + la * a * a * su * bv);
    fv[i] = q[i] * (la * a * b * au * sv);
    hu[i] = q[i] * (la * a * b * su * bv);
    hv[i] = q[i] * (crit * cp.mu2 * signed_pow(v, crit) + la * b * b * au * sv);
  }
  for (auto* r : {&fu, &fv, &hu, &hv}) grid.solve_h1(*r);
  PairState gf{ReducedProfile(n), ReducedProfile(n)};
  PairState gh{ReducedProfile(n), ReducedProfile(n)};
  for (std::size_t i = 0; i < n; ++i) {
    gf.u[i] = 2.0 * pair.u[i] - fu[i];
    gf.v[i] = -fv[i];
    gh.u[i] = -hu[i];
    gh.v[i] = 2.0 * pair.v[i] - hv[i];
  }
  return {std::move(gf), std::move(gh)};
}

Scaling nehari_project(const PairIntegrals& I, const CouplingParams& cp, int N,
                       const NewtonOptions& opts) {
  const double crit = 2.0 * N / (N - 2.0);
  const double tiny = 1e-300;
  if (!(I.grad_u > tiny) || !(I.crit_u > tiny))
    throw DegenerateError("nehari_project: u is numerically zero");
  if (!(I.grad_v > tiny) || !(I.crit_v > tiny))
    throw DegenerateError("nehari_project: v is numerically zero");

  const double e = crit - 2.0;
  const double cu = cp.mu1 * I.crit_u / I.grad_u;
  const double cv = cp.mu2 * I.crit_v / I.grad_v;
  const double ku = -cp.lambda * cp.alpha * I.coupling / I.grad_u;
  const double kv = -cp.lambda * cp.beta * I.coupling / I.grad_v;
  const double a = cp.alpha, b = cp.beta;

  // Residuals divided by s²‖u‖² and t²‖v‖², in x = log s, y = log t:
  //   G1 = 1 - cu e^{ex} + ku e^{(a-2)x + by}
  //   G2 = 1 - cv e^{ey} + kv e^{ax + (b-2)y}
  auto eval = [&](double x, double y, double G[2], double Jm[2][2]) {
    const double pu = cu * std::exp(e * x), pv = cv * std::exp(e * y);
    const double mu = ku * std::exp((a - 2.0) * x + b * y);
    const double mv = kv * std::exp(a * x + (b - 2.0) * y);
    G[0] = 1.0 - pu + mu;
    G[1] = 1.0 - pv + mv;
    if (Jm) {
      Jm[0][0] = -e * pu + (a - 2.0) * mu;
      Jm[0][1] = b * mu;
      Jm[1][0] = a * mv;
      Jm[1][1] = -e * pv + (b - 2.0) * mv;
    }
  };

  double x = -std::log(cu) / e;
  double y = -std::log(cv) / e;
  double G[2], Jm[2][2];
  eval(x, y, G, Jm);
  double norm = std::hypot(G[0], G[1]);
  for (int it = 0; it < opts.max_iters && norm > opts.tol; ++it) {
    const double det = Jm[0][0] * Jm[1][1] - Jm[0][1] * Jm[1][0];
    double dx, dy;
    if (std::fabs(det) > 1e-300) {
      dx = -(Jm[1][1] * G[0] - Jm[0][1] * G[1]) / det;
      dy = -(-Jm[1][0] * G[0] + Jm[0][0] * G[1]) / det;
    } else {
      dx = -G[0] / std::min(Jm[0][0], -1e-12);
      dy = -G[1] / std::min(Jm[1][1], -1e-12);
    }
    // Cap the step in log space and backtrack on the residual norm.
    const double cap = 2.0 / std::max(2.0, std::max(std::fabs(dx), std::fabs(dy)));
    dx *= cap;
    dy *= cap;
    double step = 1.0;
    double Gt[2];
    for (int bt = 0; bt < 60; ++bt) {
      eval(x + step * dx, y + step * dy, Gt, nullptr);
      if (std::hypot(Gt[0], Gt[1]) < (1.0 - 1e-4 * step) * norm) break;
      step *= 0.5;
    }
    x += step * dx;
    y += step * dy;
    eval(x, y, G, Jm);
    norm = std::hypot(G[0], G[1]);
  }
  if (!(norm <= std::max(opts.tol, 1e-10)) || !std::isfinite(x) || !std::isfinite(y))
    throw ConvergenceError("nehari_project: Newton did not converge", norm);
  return {std::exp(x), std::exp(y)};
}

Scaling nehari_project(const PairState& pair, const CouplingParams& cp, const ReducedGrid& grid,
                       const NewtonOptions& opts) {
  return nehari_project(pair_integrals(pair, cp, grid), cp, grid.params().N, opts);
}

double single_project(const ReducedProfile& u, double mu, const ReducedGrid& grid) {
  const double crit = grid.params().crit();
  const double a = h1_form(u, u, grid);
  const double b = mu * kernels::weighted_abs_pow(grid.exec(), grid.weights(), u, crit);
  if (!(a > 1e-300) || !(b > 1e-300)) throw DegenerateError("single_project: zero profile");
  return std::pow(a / b, 1.0 / (crit - 2.0));
}

NehariJacobian nehari_jacobian(const PairIntegrals& I, const CouplingParams& cp, double crit) {
  const double la = cp.lambda, a = cp.alpha, b = cp.beta, C = I.coupling;
  return {(2.0 - crit) * cp.mu1 * I.crit_u + la * a * (2.0 - a) * C, -la * a * b * C,
          (2.0 - crit) * cp.mu2 * I.crit_v + la * b * (2.0 - b) * C};
}

double nehari_norm_bound(double mu, int N) {
  return std::pow(mu, -(N - 2.0) / 2.0) * std::pow(sobolev_constant(N), N / 2.0);
}

double nehari_det_bound(const PairIntegrals& I, const CouplingParams& cp, int N) {
  const double crit = 2.0 * N / (N - 2.0);
  const double c0 = std::min(nehari_norm_bound(cp.mu1, N), nehari_norm_bound(cp.mu2, N));
  return (crit - 2.0) * c0 * cp.alpha * cp.beta * (-cp.lambda) * I.coupling;
}

NehariCheck check_nehari_point(const PairState& pair, const CouplingParams& cp,
                               const ReducedGrid& grid, std::uint64_t seed, int samples) {
  const int N = grid.params().N;
  const double crit = grid.params().crit();
  const PairIntegrals I = pair_integrals(pair, cp, grid);
  NehariCheck c;
  const double E = energy_from(I, cp, crit);
  c.energy_identity = std::fabs(E - (I.grad_u + I.grad_v) / N) / std::fabs(E);
  c.norm_ratio_u = I.grad_u / nehari_norm_bound(cp.mu1, N);
  c.norm_ratio_v = I.grad_v / nehari_norm_bound(cp.mu2, N);
  c.det = nehari_jacobian(I, cp, crit).det();
  c.det_bound = nehari_det_bound(I, cp, N);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> logscale(-3.0, 3.0);
  c.max_gain = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Scaling st{std::exp(logscale(rng)), std::exp(logscale(rng))};
    c.max_gain = std::max(c.max_gain, (energy_from(I, cp, crit, st) - E) / std::fabs(E));
  }
  return c;
}

TangentSplit tangent_split(const PairState& pair, const CouplingParams& cp,
                           const ReducedGrid& grid) {
  TangentSplit out;
  out.full = gradient(pair, cp, grid);
  auto [gf, gh] = constraint_gradients(pair, cp, grid);
  const double g11 = pair_inner(gf, gf, grid), g12 = pair_inner(gf, gh, grid),
               g22 = pair_inner(gh, gh, grid);
  const double r1 = pair_inner(out.full, gf, grid), r2 = pair_inner(out.full, gh, grid);
  const double det = g11 * g22 - g12 * g12;
  if (!(det > 1e-14 * g11 * g22))
    throw DegenerateError("tangent_gradient: constraint Gram matrix is singular");
  out.mult_f = (g22 * r1 - g12 * r2) / det;
  out.mult_h = (g11 * r2 - g12 * r1) / det;
  out.tangent = out.full;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.tangent.u[i] -= out.mult_f * gf.u[i] + out.mult_h * gh.u[i];
    out.tangent.v[i] -= out.mult_f * gf.v[i] + out.mult_h * gh.v[i];
  }
  out.gram[0] = g11;
  out.gram[1] = g12;
  out.gram[2] = g22;
  out.grad_f = std::move(gf);
  out.grad_h = std::move(gh);
  return out;
}

PairState tangent_gradient(const PairState& pair, const CouplingParams& cp,
                           const ReducedGrid& grid) {
  return tangent_split(pair, cp, grid).tangent;
}

double single_energy(const ReducedProfile& u, double mu, const ReducedGrid& grid) {
  const double crit = grid.params().crit();
  return 0.5 * h1_form(u, u, grid) -
         mu / crit * kernels::weighted_abs_pow(grid.exec(), grid.weights(), u, crit);
}

double single_residual(const ReducedProfile& u, double mu, const ReducedGrid& grid) {
  const double crit = grid.params().crit();
  return h1_form(u, u, grid) - mu * kernels::weighted_abs_pow(grid.exec(), grid.weights(), u, crit);
}

ReducedProfile single_gradient(const ReducedProfile& u, double mu, const ReducedGrid& grid) {
  check_profile(u, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  ReducedProfile r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = q[i] * mu * signed_pow(u[i], crit);
  grid.solve_h1(r);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i] - r[i];
  return r;
}

ReducedProfile single_constraint_gradient(const ReducedProfile& u, double mu,
                                          const ReducedGrid& grid) {
  check_profile(u, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  ReducedProfile r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = q[i] * crit * mu * signed_pow(u[i], crit);
  grid.solve_h1(r);
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = 2.0 * u[i] - r[i];
  return r;
}

ReducedProfile positive_part(const ReducedProfile& w) {
  ReducedProfile p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = std::max(w[i], 0.0);
  return p;
}

ReducedProfile negative_part(const ReducedProfile& w) {
  ReducedProfile p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = std::min(w[i], 0.0);
  return p;
}

double limit_energy(const ReducedProfile& w, const CouplingParams& cp, const ReducedGrid& grid) {
  check_profile(w, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  double pot = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    pot += q[i] * (w[i] > 0.0 ? cp.mu1 : cp.mu2) * abs_pow(w[i], crit);
  return 0.5 * h1_form(w, w, grid) - pot / crit;
}

std::pair<double, double> limit_residuals(const ReducedProfile& w, const CouplingParams& cp,
                                          const ReducedGrid& grid) {
  check_profile(w, grid);
  return {single_residual(positive_part(w), cp.mu1, grid),
          single_residual(negative_part(w), cp.mu2, grid)};
}

ReducedProfile limit_gradient(const ReducedProfile& w, const CouplingParams& cp,
                              const ReducedGrid& grid) {
  check_profile(w, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  ReducedProfile r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    r[i] = q[i] * (w[i] > 0.0 ? cp.mu1 : cp.mu2) * signed_pow(w[i], crit);
  grid.solve_h1(r);
  for (std::size_t i = 0; i < w.size(); ++i) r[i] = w[i] - r[i];
  return r;
}

std::pair<ReducedProfile, ReducedProfile> limit_constraint_gradients(const ReducedProfile& w,
                                                                     const CouplingParams& cp,
                                                                     const ReducedGrid& grid) {
  check_profile(w, grid);
  const double crit = grid.params().crit();
  const auto q = grid.weights();
  const std::size_t n = w.size();
  const ReducedProfile wp = positive_part(w), wm = negative_part(w);
  ReducedProfile ap(n), am(n);
  grid.apply_h1(wp, ap);
  grid.apply_h1(wm, am);
  ReducedProfile dp(n, 0.0), dm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] > 0.0) dp[i] = 2.0 * ap[i] - crit * cp.mu1 * q[i] * signed_pow(w[i], crit);
    if (w[i] < 0.0) dm[i] = 2.0 * am[i] - crit * cp.mu2 * q[i] * signed_pow(w[i], crit);
  }
  return {riesz(std::move(dp), grid), riesz(std::move(dm), grid)};
}

}  // namespace nehari
