#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nehari/errors.hpp"
#include "nehari/separation.hpp"
#include "nehari/solver.hpp"
#include "oracles.hpp"

using namespace nehari;
using std::numbers::pi;

namespace {

const double S = 8 * pi / std::sqrt(6.0);

PairState reflect(const PairState& p) {
  PairState r{ReducedProfile(p.v.rbegin(), p.v.rend()), ReducedProfile(p.u.rbegin(), p.u.rend())};
  return r;
}

}  // namespace

TEST_CASE("single-component mode finds the constant solution") {
  const ReducedGrid g({4, 2, 3, 512});
  SolveOptions o;
  o.single_component = true;
  const SolveResult r = minimize_nehari(initial_guess(InitKind::bumps, g), {1, 1, 2, 2, 0}, g, o);
  CHECK(r.converged);
  CHECK(oracle::rel(r.energy, S * S / 4) < 5e-3);
  const double mean = integrate(r.pair.u, g) / oracle::sphere_area(4);
  for (double x : r.pair.u) CHECK(x == doctest::Approx(mean).epsilon(1e-4));
}

TEST_CASE("coupled minimization at lambda = -1") {
  const ReducedGrid g({4, 2, 3, 512});
  const CouplingParams cp{1, 1, 2, 2, -1};
  SolveOptions o;
  int seen = 0;
  const SolveResult r =
      minimize_nehari(initial_guess(InitKind::bumps, g), cp, g, o,
                      [&](const PairState&, int) { ++seen; });
  CHECK(r.converged);
  CHECK(r.energy > 0.5 * S * S * 1.01);
  CHECK(seen == r.iterations + 1);
  CHECK(std::is_sorted(r.energy_history.rbegin(), r.energy_history.rend()));
  CHECK(std::fabs(r.residuals.f_val) < 1e-10 * r.energy);
  CHECK(std::fabs(r.residuals.h_val) < 1e-10 * r.energy);
  CHECK(r.grad_norm <= o.grad_tol);
}

TEST_CASE("weak coupling approaches two decoupled constants") {
  const ReducedGrid g({4, 2, 3, 256});
  const CouplingParams cp{1, 1, 2, 2, -1e-4};
  const SolveResult r = minimize_nehari(initial_guess(InitKind::bumps, g), cp, g, SolveOptions{});
  CHECK(r.converged);
  // single-equation oracle: the decoupled level is twice the single level
  SolveOptions so;
  so.single_component = true;
  const SolveResult one = minimize_nehari(initial_guess(InitKind::bumps, g), {1, 1, 2, 2, 0}, g, so);
  CHECK(oracle::rel(r.energy, 2 * one.energy) < 1e-3);
  CHECK(r.energy >= 2 * one.energy * (1 - 1e-12));
}

TEST_CASE("reflection invariance") {
  // θ ↦ π/2 - θ with (m, n), (μ₁, μ₂), (α, β) swapped and u, v exchanged.
  const ReducedGrid g({5, 2, 4, 256});
  const ReducedGrid h({5, 4, 2, 256});
  const CouplingParams cp{1, 1.5, 5.0 / 3, 5.0 / 3, -2};
  const CouplingParams cq{1.5, 1, 5.0 / 3, 5.0 / 3, -2};
  const PairState init = initial_guess(InitKind::constants_split, g);
  const SolveResult a = minimize_nehari(init, cp, g, SolveOptions{});
  const SolveResult b = minimize_nehari(reflect(init), cq, h, SolveOptions{});
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(oracle::rel(b.energy, a.energy) <= 1e-8);
}

TEST_CASE("limit problem") {
  const ReducedGrid g({4, 2, 3, 2048});
  const CouplingParams cp{1, 1, 2, 2, -1};
  const PairState init = initial_guess(InitKind::bumps, g);
  ReducedProfile w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = init.u[i] - init.v[i];
  const LimitResult r = minimize_limit(w, cp, g, SolveOptions{});
  CHECK(r.converged);
  const double bound = nehari_norm_bound(1.0, 4);
  CHECK(h1_form(positive_part(r.w), positive_part(r.w), g) >= 0.99 * bound);
  CHECK(h1_form(negative_part(r.w), negative_part(r.w), g) >= 0.99 * bound);
  // strictly above the unattained level (1/N)(μ₁^{-1} + μ₂^{-1}) S², 1% margin
  CHECK(r.energy >= 1.01 * 0.25 * 2 * S * S);
  CHECK(std::is_sorted(r.energy_history.rbegin(), r.energy_history.rend()));
}

TEST_CASE("symmetric limit problem") {
  const ReducedGrid g({5, 3, 3, 512});
  const CouplingParams cp{1, 1, 5.0 / 3, 5.0 / 3, -1};
  ReducedProfile w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(2 * g.nodes()[i]) + 0.3;
  const LimitResult r = minimize_limit(w, cp, g, SolveOptions{});
  CHECK(r.converged);
  ReducedProfile rw(r.w.rbegin(), r.w.rend());
  for (double& x : rw) x = -x;
  CHECK(limit_energy(rw, cp, g) == doctest::Approx(r.energy).epsilon(1e-12));
  CHECK(std::fabs(interface_locate(r.w, g) - pi / 4) <= g.spacing());
}

TEST_CASE("initial guesses") {
  const ReducedGrid g({4, 2, 3, 256});
  const CouplingParams cp{1, 1, 2, 2, -1};
  const PairState b = initial_guess(InitKind::bumps, g);
  CHECK(pair_integrals(b, cp, g).coupling == 0.0);
  CHECK(*std::max_element(b.u.begin(), b.u.end()) > 0);
  CHECK(*std::max_element(b.v.begin(), b.v.end()) > 0);
  const PairState c = initial_guess(InitKind::constants_split, g);
  CHECK(c.u.front() > 0.99);
  CHECK(c.v.back() > 0.99);
  CHECK(c.u.back() < 0.01);
  const PairState r1 = initial_guess(InitKind::random, g, 42);
  const PairState r2 = initial_guess(InitKind::random, g, 42);
  const PairState r3 = initial_guess(InitKind::random, g, 43);
  CHECK(r1.u == r2.u);
  CHECK(r1.v == r2.v);
  CHECK(r1.u != r3.u);
  CHECK(parse_init_kind(to_string(InitKind::constants_split)) == InitKind::constants_split);
  CHECK_THROWS_AS(parse_init_kind("gaussian"), DomainError);
}

TEST_CASE("solver input errors") {
  const ReducedGrid g({4, 2, 3, 64});
  PairState p = initial_guess(InitKind::bumps, g);
  std::fill(p.v.begin(), p.v.end(), 0.0);
  CHECK_THROWS_AS(minimize_nehari(p, {1, 1, 2, 2, -1}, g, SolveOptions{}), Error);
  SolveOptions bad;
  bad.grad_tol = -1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  PairState short_pair{ReducedProfile(10, 1.0), ReducedProfile(10, 1.0)};
  CHECK_THROWS_AS(minimize_nehari(short_pair, {1, 1, 2, 2, -1}, g, SolveOptions{}), DimensionError);
}
