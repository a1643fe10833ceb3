#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <numbers>
#include <random>
#include <string>

#include "nehari/errors.hpp"

namespace nehari {

void SolveOptions::validate() const {
  if (max_iters < 0) throw DomainError("SolveOptions: max_iters must be >= 0");
  if (!(grad_tol > 0.0)) throw DomainError("SolveOptions: grad_tol must be > 0");
  if (!(armijo_slope > 0.0 && armijo_slope < 1.0))
    throw DomainError("SolveOptions: armijo slope fraction must lie in (0, 1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw DomainError("SolveOptions: backtrack factor must lie in (0, 1)");
  if (!(multiplier_tol > 0.0)) throw DomainError("SolveOptions: multiplier_tol must be > 0");
}

namespace {

// Riemannian L-BFGS on a codimension-1 or -2 constraint set: two-loop
// recursion in the H¹ metric, search direction projected on the tangent
// space, retraction by the problem's projection, monotone Armijo test.
// Falls back to the negative tangent gradient when the quasi-Newton
// direction is not a descent direction or its line search fails.
template <typename State>
struct Split {
  State tangent;
  State full;
  double mult1 = 0.0;
  double mult2 = 0.0;
  std::vector<State> normals;  // constraint gradients
  double gram_inv[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

template <typename State>
struct Outcome {
  State x;
  double energy = 0.0;
  double rel_grad = 0.0;
  double rel_full = 0.0;
  double mult1 = 0.0;
  double mult2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  std::string status;
};

constexpr int kMemory = 12;
constexpr double kEnergyNoise = 1e-12;

template <typename Problem>
typename Problem::State project_tangent(const Problem& prob, typename Problem::State d,
                                        const Split<typename Problem::State>& sp) {
  const std::size_t k = sp.normals.size();
  double r[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < k; ++j) r[j] = prob.inner(d, sp.normals[j]);
  for (std::size_t j = 0; j < k; ++j) {
    double c = 0.0;
    for (std::size_t l = 0; l < k; ++l) c += sp.gram_inv[j][l] * r[l];
    prob.axpy(d, -c, sp.normals[j]);
  }
  return d;
}

template <typename Problem, typename Observer>
Outcome<typename Problem::State> descend(const Problem& prob, typename Problem::State x0,
                                         const SolveOptions& opts, const Observer& observer) {
  using State = typename Problem::State;
  Outcome<State> out;
  State x = prob.project(prob.prepare(std::move(x0)), 0);
  double E = prob.energy(x);
  out.history.push_back(E);
  if (observer) observer(x, 0);

  std::vector<State> mem_s, mem_y;
  std::vector<double> mem_rho;
  State x_prev, g_prev;
  bool have_prev = false;
  std::optional<Split<State>> cached;
  int k = 0;
  for (;; ++k) {
    Split<State> sp = cached ? std::move(*cached) : prob.split(x);
    cached.reset();
    const double xn = std::sqrt(prob.inner(x, x));
    const double gn = std::sqrt(prob.inner(sp.tangent, sp.tangent));
    out.rel_grad = gn / xn;
    out.rel_full = std::sqrt(prob.inner(sp.full, sp.full)) / xn;
    out.mult1 = sp.mult1;
    out.mult2 = sp.mult2;
    if (out.rel_grad <= opts.grad_tol &&
        std::max(std::fabs(sp.mult1), std::fabs(sp.mult2)) <= opts.multiplier_tol) {
      out.converged = true;
      out.status = "converged";
      break;
    }
    if (k >= opts.max_iters) {
      out.status = "max_iters exceeded";
      break;
    }

    if (have_prev) {
      State s = prob.sub(x, x_prev);
      State y = prob.sub(sp.tangent, g_prev);
      const double sy = prob.inner(s, y);
      if (sy > 1e-12 * std::sqrt(prob.inner(s, s) * prob.inner(y, y))) {
        mem_s.push_back(std::move(s));
        mem_y.push_back(std::move(y));
        mem_rho.push_back(1.0 / sy);
        if (static_cast<int>(mem_s.size()) > kMemory) {
          mem_s.erase(mem_s.begin());
          mem_y.erase(mem_y.begin());
          mem_rho.erase(mem_rho.begin());
        }
      }
    }

    auto quasi_newton = [&]() {
      State q = sp.tangent;
      const std::size_t m = mem_s.size();
      std::vector<double> a(m);
      for (std::size_t i = m; i-- > 0;) {
        a[i] = mem_rho[i] * prob.inner(mem_s[i], q);
        prob.axpy(q, -a[i], mem_y[i]);
      }
      const double gamma =
          1.0 / (mem_rho[m - 1] * prob.inner(mem_y[m - 1], mem_y[m - 1]));
      prob.scale(q, gamma);
      for (std::size_t i = 0; i < m; ++i) {
        const double b = mem_rho[i] * prob.inner(mem_y[i], q);
        prob.axpy(q, a[i] - b, mem_s[i]);
      }
      State d = project_tangent(prob, std::move(q), sp);
      prob.scale(d, -1.0);
      return d;
    };
    auto steepest = [&]() {
      State d = sp.tangent;
      prob.scale(d, -1.0);
      return d;
    };

    bool accepted = false;
    bool collapsed = false;
    State trial;
    double Et = E;
    const bool qn_available = !mem_s.empty();
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool use_qn = attempt == 0 && qn_available;
      if (attempt == 1 && !qn_available) break;
      State d = use_qn ? quasi_newton() : steepest();
      double slope = prob.inner(sp.tangent, d);
      if (use_qn && !(slope < -1e-10 * gn * std::sqrt(prob.inner(d, d)))) {
        d = steepest();
        slope = -gn * gn;
      }
      double tau = 1.0;
      for (int bt = 0; bt < 60; ++bt) {
        try {
          trial = prob.project(prob.advance(x, tau, d), k + 1);
          Et = prob.energy(trial);
          collapsed = false;
          if (std::isfinite(Et) && Et <= E + opts.armijo_slope * tau * slope) {
            accepted = true;
            break;
          }
          // Near a minimiser the sufficient decrease drops below the rounding
          // noise of E. Accept a step that stays within that noise as long as
          // it shrinks the tangent gradient.
          if (std::isfinite(Et) && Et <= E + kEnergyNoise * std::fabs(E)) {
            Split<State> st = prob.split(trial);
            if (std::sqrt(prob.inner(st.tangent, st.tangent)) < gn) {
              cached = std::move(st);
              accepted = true;
              break;
            }
          }
        } catch (const CollapseError&) {
          collapsed = true;
        } catch (const DegenerateError&) {
          collapsed = true;
        } catch (const ConvergenceError&) {
        }
        tau *= opts.backtrack;
      }
      if (!accepted) {
        mem_s.clear();
        mem_y.clear();
        mem_rho.clear();
      }
    }
    if (!accepted) {
      if (collapsed) throw CollapseError("descent: a component collapsed to zero", k + 1);
      out.status = "line search stalled";
      break;
    }
    x_prev = std::move(x);
    g_prev = std::move(sp.tangent);
    have_prev = true;
    x = std::move(trial);
    E = Et;
    out.history.push_back(E);
    if (observer) observer(x, k + 1);
  }
  out.x = std::move(x);
  out.energy = E;
  out.iterations = k;
  return out;
}

void axpy_into(ReducedProfile& y, double a, const ReducedProfile& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

ReducedProfile sub_profiles(const ReducedProfile& a, const ReducedProfile& b) {
  ReducedProfile r(a);
  axpy_into(r, -1.0, b);
  return r;
}

void make_abs(ReducedProfile& p) {
  for (double& x : p) x = std::fabs(x);
}

template <typename State>
void set_gram_inverse(Split<State>& sp, double g11, double g12, double g22) {
  const double det = g11 * g22 - g12 * g12;
  sp.gram_inv[0][0] = g22 / det;
  sp.gram_inv[0][1] = sp.gram_inv[1][0] = -g12 / det;
  sp.gram_inv[1][1] = g11 / det;
}

// Vector operations shared by the profile-valued problems.
struct ProfileOps {
  using State = ReducedProfile;
  const ReducedGrid& grid;
  double inner(const State& a, const State& b) const { return h1_form(a, b, grid); }
  State sub(const State& a, const State& b) const { return sub_profiles(a, b); }
  void axpy(State& y, double a, const State& x) const { axpy_into(y, a, x); }
  void scale(State& y, double a) const {
    for (double& v : y) v *= a;
  }
};

struct NehariProblem {
  using State = PairState;
  const CouplingParams& cp;
  const ReducedGrid& grid;
  const SolveOptions& opts;

  State prepare(State x) const {
    check_pair(x, grid);
    if (opts.positivity_enforced) {
      make_abs(x.u);
      make_abs(x.v);
    }
    return x;
  }
  State project(State x, int iter) const {
    const PairIntegrals I = pair_integrals(x, cp, grid);
    Scaling st;
    try {
      st = nehari_project(I, cp, grid.params().N);
    } catch (const DegenerateError& e) {
      throw CollapseError(e.what(), iter);
    }
    for (double& a : x.u) a *= st.s;
    for (double& a : x.v) a *= st.t;
    const int N = grid.params().N;
    const double gu = st.s * st.s * I.grad_u, gv = st.t * st.t * I.grad_v;
    if (gu < 0.1 * nehari_norm_bound(cp.mu1, N) || gv < 0.1 * nehari_norm_bound(cp.mu2, N))
      throw CollapseError("Nehari projection: component norm below collapse threshold", iter);
    return x;
  }
  double energy(const State& x) const { return nehari::energy(x, cp, grid); }
  Split<State> split(const State& x) const {
    TangentSplit t = tangent_split(x, cp, grid);
    Split<State> sp;
    sp.tangent = std::move(t.tangent);
    sp.full = std::move(t.full);
    sp.mult1 = t.mult_f;
    sp.mult2 = t.mult_h;
    set_gram_inverse(sp, t.gram[0], t.gram[1], t.gram[2]);
    sp.normals.push_back(std::move(t.grad_f));
    sp.normals.push_back(std::move(t.grad_h));
    return sp;
  }
  double inner(const State& a, const State& b) const { return pair_inner(a, b, grid); }
  State sub(const State& a, const State& b) const {
    return {sub_profiles(a.u, b.u), sub_profiles(a.v, b.v)};
  }
  void axpy(State& y, double a, const State& x) const {
    axpy_into(y.u, a, x.u);
    axpy_into(y.v, a, x.v);
  }
  void scale(State& y, double a) const {
    for (double& v : y.u) v *= a;
    for (double& v : y.v) v *= a;
  }
  State advance(const State& x, double tau, const State& d) const {
    State y = x;
    axpy(y, tau, d);
    if (opts.positivity_enforced) {
      make_abs(y.u);
      make_abs(y.v);
    }
    return y;
  }
};

struct SingleProblem : ProfileOps {
  double mu;
  const SolveOptions& opts;

  SingleProblem(const ReducedGrid& g, double mu_, const SolveOptions& o)
      : ProfileOps{g}, mu(mu_), opts(o) {}

  State prepare(State x) const {
    check_profile(x, grid);
    if (opts.positivity_enforced) make_abs(x);
    return x;
  }
  State project(State x, int iter) const {
    double s;
    try {
      s = single_project(x, mu, grid);
    } catch (const DegenerateError& e) {
      throw CollapseError(e.what(), iter);
    }
    for (double& a : x) a *= s;
    return x;
  }
  double energy(const State& x) const { return single_energy(x, mu, grid); }
  Split<State> split(const State& x) const {
    Split<State> sp;
    sp.full = single_gradient(x, mu, grid);
    State gf = single_constraint_gradient(x, mu, grid);
    const double gg = h1_form(gf, gf, grid);
    if (!(gg > 0.0)) throw DegenerateError("single-component constraint gradient vanished");
    sp.mult1 = h1_form(sp.full, gf, grid) / gg;
    sp.tangent = sp.full;
    axpy_into(sp.tangent, -sp.mult1, gf);
    sp.gram_inv[0][0] = 1.0 / gg;
    sp.normals.push_back(std::move(gf));
    return sp;
  }
  State advance(const State& x, double tau, const State& d) const {
    State y = x;
    axpy_into(y, tau, d);
    if (opts.positivity_enforced) make_abs(y);
    return y;
  }
};

struct LimitProblem : ProfileOps {
  const CouplingParams& cp;

  LimitProblem(const ReducedGrid& g, const CouplingParams& c) : ProfileOps{g}, cp(c) {}

  State prepare(State x) const {
    check_profile(x, grid);
    return x;
  }
  State project(State x, int iter) const {
    const ReducedProfile wp = positive_part(x), wm = negative_part(x);
    double s, t;
    try {
      s = single_project(wp, cp.mu1, grid);
      t = single_project(wm, cp.mu2, grid);
    } catch (const DegenerateError&) {
      throw CollapseError("limit projection: w lost its positive or negative part", iter);
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s * wp[i] + t * wm[i];
    const int N = grid.params().N;
    const double np = s * s * h1_form(wp, wp, grid), nm = t * t * h1_form(wm, wm, grid);
    if (np < 0.1 * nehari_norm_bound(cp.mu1, N) || nm < 0.1 * nehari_norm_bound(cp.mu2, N))
      throw CollapseError("limit projection: part norm below collapse threshold", iter);
    return x;
  }
  double energy(const State& x) const { return limit_energy(x, cp, grid); }
  Split<State> split(const State& x) const {
    Split<State> sp;
    sp.full = limit_gradient(x, cp, grid);
    auto [g1, g2] = limit_constraint_gradients(x, cp, grid);
    const double a11 = h1_form(g1, g1, grid), a12 = h1_form(g1, g2, grid),
                 a22 = h1_form(g2, g2, grid);
    const double r1 = h1_form(sp.full, g1, grid), r2 = h1_form(sp.full, g2, grid);
    const double det = a11 * a22 - a12 * a12;
    if (!(det > 1e-14 * a11 * a22))
      throw DegenerateError("limit constraint Gram matrix is singular");
    sp.mult1 = (a22 * r1 - a12 * r2) / det;
    sp.mult2 = (a11 * r2 - a12 * r1) / det;
    sp.tangent = sp.full;
    axpy_into(sp.tangent, -sp.mult1, g1);
    axpy_into(sp.tangent, -sp.mult2, g2);
    set_gram_inverse(sp, a11, a12, a22);
    sp.normals.push_back(std::move(g1));
    sp.normals.push_back(std::move(g2));
    return sp;
  }
  State advance(const State& x, double tau, const State& d) const {
    State y = x;
    axpy_into(y, tau, d);
    return y;
  }
};

}  // namespace

SolveResult minimize_nehari(const PairState& init, const CouplingParams& cp,
                            const ReducedGrid& grid, const SolveOptions& opts,
                            const PairObserver& observer) {
  opts.validate();
  const int N = grid.params().N;
  SolveResult res;
  if (opts.single_component) {
    cp.validate(N, false);
    SingleProblem prob(grid, cp.mu1, opts);
    LimitObserver obs;
    if (observer)
      obs = [&](const ReducedProfile& u, int k) {
        observer(PairState{u, ReducedProfile(u.size(), 0.0)}, k);
      };
    auto o = descend(prob, init.u, opts, obs);
    res.pair = {std::move(o.x), ReducedProfile(grid.size(), 0.0)};
    res.energy = o.energy;
    res.grad_norm = o.rel_grad;
    res.full_grad_norm = o.rel_full;
    res.mult_f = o.mult1;
    res.iterations = o.iterations;
    res.converged = o.converged;
    res.energy_history = std::move(o.history);
    res.status = std::move(o.status);
    res.residuals = {single_residual(res.pair.u, cp.mu1, grid), 0.0};
    return res;
  }
  cp.validate(N, true);
  NehariProblem prob{cp, grid, opts};
  auto o = descend(prob, init, opts, observer);
  res.pair = std::move(o.x);
  res.energy = o.energy;
  res.grad_norm = o.rel_grad;
  res.full_grad_norm = o.rel_full;
  res.mult_f = o.mult1;
  res.mult_h = o.mult2;
  res.iterations = o.iterations;
  res.converged = o.converged;
  res.energy_history = std::move(o.history);
  res.status = std::move(o.status);
  res.residuals = residuals(res.pair, cp, grid);
  return res;
}

LimitResult minimize_limit(const ReducedProfile& init_w, const CouplingParams& cp,
                           const ReducedGrid& grid, const SolveOptions& opts,
                           const LimitObserver& observer) {
  opts.validate();
  cp.validate(grid.params().N, false);
  LimitProblem prob(grid, cp);
  auto o = descend(prob, init_w, opts, observer);
  LimitResult res;
  res.w = std::move(o.x);
  res.energy = o.energy;
  res.grad_norm = o.rel_grad;
  res.iterations = o.iterations;
  // Only the tangent condition is required here; the multipliers carry the
  // discrete interface-cell cross term and are not asserted to vanish.
  res.converged = o.rel_grad <= opts.grad_tol;
  res.energy_history = std::move(o.history);
  res.status = res.converged ? "converged" : o.status;
  res.residuals = limit_residuals(res.w, cp, grid);
  return res;
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "bumps") return InitKind::bumps;
  if (s == "constants_split") return InitKind::constants_split;
  if (s == "random") return InitKind::random;
  throw DomainError("unknown init kind '" + s + "'");
}

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::bumps: return "bumps";
    case InitKind::constants_split: return "constants_split";
    case InitKind::random: return "random";
  }
  return "bumps";
}

PairState initial_guess(InitKind kind, const ReducedGrid& grid, std::uint64_t seed) {
  constexpr double half_pi = std::numbers::pi / 2;
  const auto nodes = grid.nodes();
  const std::size_t n = grid.size();
  PairState p{ReducedProfile(n, 0.0), ReducedProfile(n, 0.0)};
  switch (kind) {
    case InitKind::bumps: {
      // C∞ caps exp(1 - 1/(1 - x²)) of radius 0.4·π/2 around each endpoint.
      const double radius = 0.4 * half_pi;
      auto cap = [&](double d) {
        const double x = d / radius;
        return x < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
      };
      for (std::size_t i = 0; i < n; ++i) {
        p.u[i] = cap(nodes[i]);
        p.v[i] = cap(half_pi - nodes[i]);
      }
      break;
    }
    case InitKind::constants_split: {
      const double width = 0.05;
      for (std::size_t i = 0; i < n; ++i) {
        const double z = (nodes[i] - half_pi / 2) / width;
        p.u[i] = 1.0 / (1.0 + std::exp(z));
        p.v[i] = 1.0 / (1.0 + std::exp(-z));
      }
      break;
    }
    case InitKind::random: {
      // Raw 64-bit draws mapped by hand: distribution objects are not
      // reproducible across standard libraries.
      std::mt19937_64 rng(seed);
      auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
      // Modulated split at a random angle. Heavily overlapping pairs have no
      // Nehari projection once λ ≤ -μ/α, so the supports stay mostly apart.
      const double split = half_pi * (0.3 + 0.4 * uniform());
      double cu[4], cv[4];
      for (int k = 0; k < 4; ++k) {
        cu[k] = 0.6 * (uniform() - 0.5);
        cv[k] = 0.6 * (uniform() - 0.5);
      }
      for (std::size_t i = 0; i < n; ++i) {
        double a = 1.0, b = 1.0;
        for (int k = 0; k < 4; ++k) {
          a += cu[k] * std::cos(2.0 * (k + 1) * nodes[i]);
          b += cv[k] * std::cos(2.0 * (k + 1) * nodes[i]);
        }
        const double z = (nodes[i] - split) / 0.05;
        p.u[i] = a / (1.0 + std::exp(z));
        p.v[i] = b / (1.0 + std::exp(-z));
      }
      break;
    }
  }
  return p;
}

}  // namespace nehari
