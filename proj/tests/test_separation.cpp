#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nehari/errors.hpp"
#include "nehari/separation.hpp"
#include "oracles.hpp"

using namespace nehari;
using std::numbers::pi;

TEST_CASE("geometric schedule") {
  const SweepSchedule s = SweepSchedule::geometric(-1, -1e4, 20);
  REQUIRE(s.lambdas.size() == 20);
  CHECK(s.lambdas.front() == -1.0);
  CHECK(s.lambdas.back() == -1e4);
  const double ratio = std::pow(1e4, 1.0 / 19);
  for (std::size_t i = 1; i < s.lambdas.size(); ++i)
    CHECK(s.lambdas[i] / s.lambdas[i - 1] == doctest::Approx(ratio).epsilon(1e-12));
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(SweepSchedule({{-1, -1}}).validate(), DomainError);
  CHECK_THROWS_AS(SweepSchedule({{1, -1}}).validate(), DomainError);
  CHECK_THROWS_AS(SweepSchedule({}).validate(), DomainError);
  CHECK_THROWS_AS(SweepSchedule::geometric(-1, -0.5, 5), DomainError);
}

TEST_CASE("short sweep") {
  const ReducedGrid g({4, 2, 3, 256});
  const CouplingParams cp{1, 1, 2, 2, -1};
  const SweepSchedule s{{-1, -3, -10, -30, -100}};
  const SweepOutcome o = sweep_lambda(s, cp, g, SolveOptions{});
  REQUIRE(o.records.size() == 5);
  REQUIRE(o.limit);
  CHECK(o.limit->converged);
  for (const SweepRecord& r : o.records) {
    CHECK(r.converged);
    CHECK(r.energy <= o.limit->energy * 1.01);
    CHECK(r.lambda_overlap == doctest::Approx(-r.lambda * r.overlap));
  }
  for (std::size_t i = 1; i < o.records.size(); ++i) {
    CHECK(o.records[i].energy > o.records[i - 1].energy);
    CHECK(o.records[i].overlap < o.records[i - 1].overlap);
  }

  SUBCASE("resuming reproduces the uninterrupted sweep") {
    // warm start after the second λ, taken from a two-point sweep
    const SweepOutcome head = sweep_lambda(SweepSchedule{{-1, -3}}, cp, g, SolveOptions{});
    const SweepOutcome rest =
        sweep_lambda(s, cp, g, SolveOptions{}, SweepResume{head.records, *head.last_pair});
    REQUIRE(rest.records.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(rest.records[i].energy == o.records[i].energy);
      CHECK(rest.records[i].iters == o.records[i].iters);
    }
    CHECK(rest.limit->energy == o.limit->energy);
  }
  SUBCASE("resume state must match the schedule") {
    SweepResume bad{{o.records[1]}, *o.last_pair};
    CHECK_THROWS_AS(sweep_lambda(s, cp, g, SolveOptions{}, bad), DomainError);
  }
}

TEST_CASE("a failed lambda keeps the previous warm start") {
  const ReducedGrid g({4, 2, 3, 128});
  const CouplingParams cp{1, 1, 2, 2, -1};
  const SweepSchedule s{{-1, -2, -4}};
  SweepHooks hooks;
  hooks.on_iterate = [](std::size_t i, const PairState&, int k) {
    if (i == 1 && k == 3) throw CollapseError("injected", k);
  };
  int reported = 0;
  hooks.on_record = [&](const SweepRecord&, const std::optional<PairState>& warm) {
    CHECK(warm.has_value());
    ++reported;
  };
  const SweepOutcome o = sweep_lambda(s, cp, g, SolveOptions{}, std::nullopt, hooks);
  CHECK(reported == 3);
  CHECK_FALSE(o.records[0].failed);
  CHECK(o.records[1].failed);
  CHECK(o.records[1].status.find("injected") != std::string::npos);

  const SweepOutcome first = sweep_lambda(SweepSchedule{{-1}}, cp, g, SolveOptions{});
  const SolveResult direct =
      minimize_nehari(*first.last_pair, {1, 1, 2, 2, -4}, g, SolveOptions{});
  CHECK(o.records[2].energy == direct.energy);
}

TEST_CASE("interface location") {
  const ReducedGrid g({4, 2, 3, 256});
  SUBCASE("synthetic single root") {
    for (double t0 : {0.3, 0.6, 1.1}) {
      ReducedProfile w(g.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(2 * g.nodes()[i]) - std::cos(2 * t0);
      // linear interpolation error ≤ h² max|w''| / (8 |w'(t0)|)
      const double h = g.spacing();
      CHECK(std::fabs(interface_locate(w, g) - t0) <= h * h * 4 / (8 * 2 * std::sin(2 * t0)) * 1.01);
      CHECK(count_crossings(w) == 1);
    }
  }
  SUBCASE("root on a node") {
    ReducedProfile w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(2 * g.nodes()[i]);
    CHECK(interface_locate(w, g) == doctest::Approx(pi / 4).epsilon(1e-12));
  }
  SUBCASE("errors") {
    ReducedProfile two(g.size());
    for (std::size_t i = 0; i < two.size(); ++i) two[i] = std::cos(4 * g.nodes()[i]) + 0.5;
    CHECK(count_crossings(two) == 2);
    try {
      interface_locate(two, g);
      FAIL("expected TopologyError");
    } catch (const TopologyError& e) {
      CHECK(e.crossings() == 2);
    }
    CHECK_THROWS_AS(interface_locate(ReducedProfile(g.size(), 1.0), g), TopologyError);
  }
}

TEST_CASE("tori verification") {
  const ReducedGrid g({4, 2, 3, 512});
  SUBCASE("limit minimizer") {
    const CouplingParams cp{1, 1, 2, 2, -1};
    const PairState init = initial_guess(InitKind::bumps, g);
    ReducedProfile w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = init.u[i] - init.v[i];
    const LimitResult r = minimize_limit(w, cp, g, SolveOptions{});
    const ToriReport t = verify_tori(r.w, g);
    CHECK(t.pass());
    CHECK(t.crossings == 1);
    CHECK(t.touches_zero == "positive");
    REQUIRE(t.theta0);
    CHECK(*t.theta0 > 0.0);
    CHECK(*t.theta0 < pi / 2);
  }
  SUBCASE("two sign changes") {
    ReducedProfile w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::cos(4 * g.nodes()[i]) + 0.5;
    const ToriReport t = verify_tori(w, g);
    CHECK_FALSE(t.pass());
    CHECK(t.crossings == 2);
  }
  SUBCASE("nonnegative profile") {
    const ToriReport t = verify_tori(ReducedProfile(g.size(), 0.5), g);
    CHECK_FALSE(t.pass());
    CHECK(t.crossings == 0);
  }
}

TEST_CASE("interface position across a mu2 scan") {
  // Exploratory: the direction is not predicted, only monotonicity is
  // looked at, and a violation is reported rather than failed.
  const ReducedGrid g({4, 2, 3, 512});
  const PairState init = initial_guess(InitKind::bumps, g);
  ReducedProfile w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = init.u[i] - init.v[i];
  double t[3];
  const double mus[3] = {1, 2, 4};
  for (int k = 0; k < 3; ++k)
    t[k] = interface_locate(minimize_limit(w, {1, mus[k], 2, 2, -1}, g, SolveOptions{}).w, g);
  const bool monotone = (t[0] < t[1] && t[1] < t[2]) || (t[0] > t[1] && t[1] > t[2]);
  const std::string verdict = monotone ? "monotone" : "NOT monotone";
  MESSAGE("theta0 at mu2 = 1, 2, 4: " << t[0] << ", " << t[1] << ", " << t[2] << " (" << verdict
                                       << ")");
}
