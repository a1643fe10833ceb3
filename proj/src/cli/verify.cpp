#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "io.hpp"
#include "nehari/errors.hpp"
#include "nehari/scalar.hpp"

namespace nehari::cli {
namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

ReducedProfile random_profile(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  ReducedProfile p(n);
  for (double& x : p) x = d(rng);
  return p;
}

class Battery {
 public:
  explicit Battery(std::vector<CheckRow>& rows) : rows_(rows) {}

  template <typename F>
  void run(const std::string& name, bool hard, F&& body) {
    CheckRow row{name, hard, false, ""};
    try {
      std::ostringstream detail;
      row.pass = body(detail);
      row.detail = detail.str();
    } catch (const std::exception& e) {
      row.pass = false;
      row.detail = std::string("exception: ") + e.what();
    }
    rows_.push_back(row);
  }

 private:
  std::vector<CheckRow>& rows_;
};

}  // namespace

std::vector<CheckRow> run_checks(const RunConfig& config, const VerifyOptions& opts) {
  std::vector<CheckRow> rows;
  Battery b(rows);
  const std::uint64_t seed = config.solver.seed;

  b.run("quadrature_exactness", true, [](std::ostream& d) {
    double worst = 0.0;
    for (int N = 4; N <= 8; ++N)
      for (int m = 2; m <= N - 1; ++m) {
        const ReducedGrid g({N, m, N + 1 - m, 64});
        const double area = sphere_area(N);
        worst = std::max(worst,
                         std::fabs(integrate(ReducedProfile(g.size(), 1.0), g) - area) / area);
      }
    d << "max rel err " << sci(worst);
    return worst <= 1e-10;
  });

  b.run("sobolev_dual_formula", true, [&](std::ostream& d) {
    double worst = 0.0;
    for (int N = 3; N <= 8; ++N) {
      double S = sobolev_constant(N);
      if (opts.inject_sobolev_fault) S *= 1.0 + 1e-6;
      worst = std::max(worst, std::fabs(S - sobolev_constant_sphere(N)) / S);
    }
    d << "max rel diff " << sci(worst);
    return worst <= 1e-12;
  });

  b.run("weight_symmetry", true, [](std::ostream& d) {
    double worst = 0.0;
    for (int N = 4; N <= 8; ++N)
      for (int m = 2; m <= N - 1; ++m) {
        const ModelParams a{N, m, N + 1 - m, 16}, r{N, N + 1 - m, m, 16};
        for (int i = 0; i <= 100; ++i) {
          const double th = std::numbers::pi / 2 * i / 100.0;
          const double w1 = orbit_weight(th, a), w2 = orbit_weight(std::numbers::pi / 2 - th, r);
          if (w1 > 0.0) worst = std::max(worst, std::fabs(w1 - w2) / w1);
        }
      }
    d << "max rel diff " << sci(worst);
    return worst <= 1e-12;
  });

  b.run("h1_symmetric_positive", true, [&](std::ostream& d) {
    const ReducedGrid g({4, 2, 3, 256});
    std::mt19937_64 rng(seed);
    double asym = 0.0;
    bool positive = true;
    for (int k = 0; k < 20; ++k) {
      const ReducedProfile a = random_profile(g.size(), rng, -1, 1);
      const ReducedProfile c = random_profile(g.size(), rng, -1, 1);
      const double ab = h1_form(a, c, g), ba = h1_form(c, a, g);
      asym = std::max(asym, std::fabs(ab - ba) / std::max(std::fabs(ab), 1e-300));
      positive = positive && h1_form(a, a, g) > 0.0;
    }
    d << "max asymmetry " << sci(asym);
    return positive && asym <= 1e-12;
  });

  b.run("constant_solution", true, [](std::ostream& d) {
    const ReducedGrid g({4, 2, 3, 256});
    const CouplingParams cp{1, 1, 2, 2, 0};
    const PairState p{ReducedProfile(g.size(), std::sqrt(2.0)), ReducedProfile(g.size(), 0.0)};
    const double S = sobolev_constant(4);
    const double e = energy(p, cp, g), level = S * S / 4;
    const NehariResiduals r = residuals(p, cp, g);
    d << "E=" << fmt(e) << " S^2/4=" << fmt(level) << " f=" << sci(r.f_val);
    return std::fabs(e - level) <= 1e-10 * level && std::fabs(r.f_val) <= 1e-9 * level;
  });

  b.run("gradient_fd", true, [&](std::ostream& d) {
    const ReducedGrid g({4, 2, 3, 256});
    const CouplingParams cp{1.3, 0.7, 2, 2, -2.5};
    std::mt19937_64 rng(seed + 1);
    double worst = 0.0;
    const double eps = 1e-5;
    for (int k = 0; k < 50; ++k) {
      const PairState p{random_profile(g.size(), rng, 0.2, 1.5),
                        random_profile(g.size(), rng, 0.2, 1.5)};
      const PairState q{random_profile(g.size(), rng, -1, 1), random_profile(g.size(), rng, -1, 1)};
      PairState pp = p, pm = p;
      for (std::size_t i = 0; i < g.size(); ++i) {
        pp.u[i] += eps * q.u[i];
        pp.v[i] += eps * q.v[i];
        pm.u[i] -= eps * q.u[i];
        pm.v[i] -= eps * q.v[i];
      }
      const double fd = (energy(pp, cp, g) - energy(pm, cp, g)) / (2 * eps);
      const double an = pair_inner(gradient(p, cp, g), q, g);
      worst = std::max(worst, std::fabs(fd - an) / std::fabs(an));
    }
    d << "max rel err " << sci(worst) << " over 50 pairs";
    return worst <= 1e-6;
  });

  b.run("projection_max_property", true, [&](std::ostream& d) {
    // Weak coupling with full overlap, then strong coupling with supports
    // that share a band of width 0.1 around π/4.
    const ReducedGrid g({4, 2, 3, 256});
    std::mt19937_64 rng(seed + 2);
    // Draws without a projection (non-positive coupling determinant) are
    // redrawn; they are not Nehari-admissible directions at all.
    double worst = -1.0;
    int redrawn = 0;
    for (int k = 0; k < 10; ++k) {
      const bool strong = k % 2 == 1;
      const CouplingParams cp{1, 1, 2, 2, strong ? -3.0 : -0.4};
      PairState p;
      for (;;) {
        p = {random_profile(g.size(), rng, 0.1, 1), random_profile(g.size(), rng, 0.1, 1)};
        if (strong)
          for (std::size_t i = 0; i < g.size(); ++i) {
            const double th = g.nodes()[i];
            if (th > std::numbers::pi / 4 + 0.05) p.u[i] = 0.0;
            if (th < std::numbers::pi / 4 - 0.05) p.v[i] = 0.0;
          }
        const PairIntegrals I = pair_integrals(p, cp, g);
        if (I.crit_u * I.crit_v > 4 * cp.lambda * cp.lambda * I.coupling * I.coupling) break;
        ++redrawn;
      }
      const Scaling st = nehari_project(p, cp, g);
      for (auto& x : p.u) x *= st.s;
      for (auto& x : p.v) x *= st.t;
      worst = std::max(worst, check_nehari_point(p, cp, g, seed + k).max_gain);
    }
    d << "max relative gain " << sci(worst) << " over 10 pairs x 100 rescalings (" << redrawn
      << " redrawn)";
    return worst <= 1e-12;
  });

  const ModelParams base{4, 2, 3, config.model.M};
  const ReducedGrid grid(base);
  const double S = sobolev_constant(4);

  b.run("single_level", true, [&](std::ostream& d) {
    SolveOptions o = config.solver;
    o.single_component = true;
    const SolveResult r = minimize_nehari(initial_guess(InitKind::bumps, grid, seed),
                                          CouplingParams{1, 1, 2, 2, 0}, grid, o);
    const double rel = std::fabs(r.energy - S * S / 4) / (S * S / 4);
    d << "E=" << fmt(r.energy) << " rel err " << sci(rel) << " (M=" << base.M << ")";
    return r.converged && rel <= 5e-3;
  });

  b.run("pair_level_gap", true, [&](std::ostream& d) {
    const CouplingParams cp{1, 1, 2, 2, -1};
    long bad = 0, seen = 0;
    const PairObserver audit = [&](const PairState& p, int k) {
      ++seen;
      if (!check_nehari_point(p, cp, grid, seed + static_cast<unsigned>(k)).ok()) ++bad;
    };
    const SolveResult r =
        minimize_nehari(initial_guess(InitKind::bumps, grid, seed), cp, grid, config.solver, audit);
    const double level = S * S / 2;
    d << "c=" << fmt(r.energy) << " vs 1.01*" << fmt(level) << "; invariant failures " << bad
      << "/" << seen;
    return r.converged && r.energy > 1.01 * level && bad == 0;
  });

  b.run("refinement_order", true, [&](std::ostream& d) {
    std::vector<double> e;
    for (int M : opts.refinement_grids) {
      const ReducedGrid g({4, 2, 3, M});
      e.push_back(minimize_nehari(initial_guess(InitKind::bumps, g, seed),
                                  CouplingParams{1, 1, 2, 2, -1}, g, config.solver)
                      .energy);
    }
    if (e.size() < 3) throw DomainError("refinement_order needs three grids");
    const double ratio = (e[1] - e[0]) / (e[2] - e[1]);
    d << "error ratio " << fmt(ratio) << " (order " << fmt(std::log2(std::fabs(ratio))) << ")";
    return ratio > 2.8 && ratio < 5.7;
  });

  b.run("symmetric_interface", true, [&](std::ostream& d) {
    const ReducedGrid g({5, 3, 3, 512});
    const CouplingParams cp{1, 1, 5.0 / 3, 5.0 / 3, -1};
    ReducedProfile w(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::cos(2 * g.nodes()[i]) + 0.3;
    const LimitResult r = minimize_limit(w, cp, g, config.solver);
    const ToriReport t = verify_tori(r.w, g);
    const double th = t.theta0.value_or(-1.0);
    d << "theta0=" << fmt(th) << " pi/4=" << fmt(std::numbers::pi / 4) << " h=" << fmt(g.spacing());
    return r.converged && t.pass() && std::fabs(th - std::numbers::pi / 4) <= g.spacing();
  });

  b.run("interface_mu2_scan", false, [&](std::ostream& d) {
    const ReducedGrid g({4, 2, 3, 512});
    std::vector<double> th;
    for (double mu2 : {1.0, 2.0, 4.0}) {
      const CouplingParams cp{1, mu2, 2, 2, -1};
      ReducedProfile w(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) w[i] = std::cos(2 * g.nodes()[i]);
      th.push_back(interface_locate(minimize_limit(w, cp, g, config.solver).w, g));
    }
    d << "theta0 at mu2=1,2,4: " << fmt(th[0]) << ", " << fmt(th[1]) << ", " << fmt(th[2]);
    return (th[0] < th[1] && th[1] < th[2]) || (th[0] > th[1] && th[1] > th[2]);
  });

  b.run("sync_diagonal", true, [](std::ostream& d) {
    const auto a = sync_solve({1, 1, 2, 2, -0.25, 4});
    const auto c = sync_solve({1, 1, 2, 2, -0.5, 4});
    bool found = false;
    double worst = 0.0;
    for (const auto& p : a) {
      found = found || (std::fabs(p.s - std::sqrt(2.0)) <= 1e-8 && std::fabs(p.t - std::sqrt(2.0)) <= 1e-8);
      const auto r = sync_residuals({1, 1, 2, 2, -0.25, 4}, p);
      worst = std::max({worst, std::fabs(r.first), std::fabs(r.second)});
    }
    d << a.size() << " solution(s) at -0.25, " << c.size() << " at -0.5; residual " << sci(worst);
    return found && c.empty() && worst <= 1e-10;
  });

  b.run("sync_threshold_brute", true, [](std::ostream& d) {
    const ThresholdBracket t = sync_threshold(1, 1, 2, 2, 4);
    SyncOptions par;
    par.exec = Exec::parallel;
    const double ls = t.lambda_star();
    const long above = sync_brute_scan({1, 1, 2, 2, ls + 1e-2, 4}, 1000, par);
    const long below = sync_brute_scan({1, 1, 2, 2, ls - 1e-2, 4}, 1000, par);
    const bool empty_below = sync_solve({1, 1, 2, 2, ls - 1e-3, 4}).empty();
    d << "lambda*=" << fmt(ls) << " brute cells above/below " << above << "/" << below;
    return std::fabs(ls + 0.5) <= 1e-5 && above > 0 && below == 0 && empty_below;
  });

  b.run("sync_scale_covariance", true, [](std::ostream& d) {
    const double l1 = sync_threshold(1, 1, 2, 2, 4).lambda_star();
    const double l4 = sync_threshold(4, 4, 2, 2, 4).lambda_star();
    const double rel = std::fabs(l4 / (4 * l1) - 1);
    d << "lambda*(4mu)/(4 lambda*(mu)) - 1 = " << sci(rel);
    return rel <= 1e-6;
  });

  b.run("sync_offdiagonal_branches", false, [](std::ostream& d) {
    const double ls = sync_threshold(1, 1, 5.0 / 3, 5.0 / 3, 5).lambda_star();
    d << "N=5 symmetric: lambda*=" << fmt(ls) << " vs -mu/alpha=" << fmt(-0.6);
    return std::fabs(ls + 0.6) <= 1e-3;
  });

  b.run("fixed_point_free", true, [](std::ostream& d) {
    const bool ok = fixed_point_free(1, 2, -0.5) && !fixed_point_free(1, 2, -0.4) &&
                    fixed_point_free(2, 1.5, -1.4);
    d << "boundary, interior and (2,1.5,-1.4) cases";
    return ok;
  });

  b.run("plane_unique_critical", true, [](std::ostream& d) {
    const PlaneReport r = plane_critical_points(plane_coeffs(1, 1, 1, 4, 2, 2), 200, 1000,
                                                Exec::parallel);
    d << r.points.size() << " critical point(s), box r=" << fmt(r.box.r) << " R=" << fmt(r.box.R)
      << " delta=" << fmt(r.box.delta);
    return r.unique_at_one && r.global_max;
  });

  b.run("plane_random_instances", true, [&](std::ostream& d) {
    std::mt19937_64 rng(seed + 3);
    std::uniform_real_distribution<double> a(0.5, 2.0), dd(0.1, 1.0);
    int tested = 0, unique = 0;
    for (int k = 0; k < 50; ++k) {
      const PlaneReport r = plane_critical_points(plane_coeffs(a(rng), a(rng), dd(rng), 4, 2, 2),
                                                  60, 200, Exec::parallel);
      if (!r.all_strict_max) continue;
      ++tested;
      if (r.unique_at_one && r.global_max) ++unique;
    }
    d << unique << "/" << tested << " instances unique at (1,1)";
    return tested > 0 && unique == tested;
  });

  return rows;
}

int cmd_verify(const RunConfig& config, const VerifyOptions& opts, std::ostream& out) {
  try {
    config.model.validate();
    config.solver.validate();
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
    return Exit::bad_config;
  }
  const std::vector<CheckRow> rows = run_checks(config, opts);
  std::vector<std::string> failed;
  for (const CheckRow& r : rows) {
    const char* verdict = r.pass ? "pass" : (r.hard ? "FAIL" : "note");
    char line[96];
    std::snprintf(line, sizeof line, "%-28s %-8s %-5s ", r.name.c_str(),
                  r.hard ? "hard" : "finding", verdict);
    out << line << r.detail << "\n";
    if (r.hard && !r.pass) failed.push_back(r.name);
  }
  if (failed.empty()) {
    out << "verify: all hard checks passed\n";
    return Exit::ok;
  }
  out << "verify: failed:";
  for (const auto& f : failed) out << " " << f;
  out << "\n";
  return Exit::check_failed;
}

}  // namespace nehari::cli
