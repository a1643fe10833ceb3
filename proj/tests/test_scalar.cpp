#include <doctest.h>

#include <cmath>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/scalar.hpp"
#include "oracles.hpp"

using namespace nehari;

namespace {

// For α = β = 2, N = 4 the synchronized system is linear in (s², t²) and
// has a positive solution iff μ₁μ₂ > 4λ².
double closed_form_threshold(double mu1, double mu2) { return -0.5 * std::sqrt(mu1 * mu2); }

bool contains(const std::vector<SyncPoint>& pts, double s, double t, double tol) {
  for (const SyncPoint& p : pts)
    if (std::fabs(p.s - s) <= tol * s && std::fabs(p.t - t) <= tol * t) return true;
  return false;
}

}  // namespace

TEST_CASE("synchronized solutions") {
  SUBCASE("diagonal branch at lambda = -1/4") {
    const auto pts = sync_solve({1, 1, 2, 2, -0.25, 4});
    CHECK(contains(pts, std::sqrt(2.0), std::sqrt(2.0), 1e-10));
    for (const SyncPoint& p : pts) {
      const auto [r1, r2] = sync_residuals({1, 1, 2, 2, -0.25, 4}, p);
      CHECK(std::fabs(r1) < 1e-10);
      CHECK(std::fabs(r2) < 1e-10);
    }
  }
  SUBCASE("no solution at lambda = -1/2") {
    CHECK(sync_solve({1, 1, 2, 2, -0.5, 4}).empty());
  }
  SUBCASE("decoupled limit") {
    const auto pts = sync_solve({2, 0.5, 2, 2, -1e-9, 4});
    CHECK(contains(pts, 1 / std::sqrt(2.0), std::sqrt(2.0), 1e-6));
  }
  SUBCASE("linear system oracle, unequal masses") {
    const double mu1 = 1.5, mu2 = 3, lam = -0.7;
    const double det = mu1 * mu2 - 4 * lam * lam;
    const double X = (mu2 - 2 * lam) / det, Y = (mu1 - 2 * lam) / det;
    const auto pts = sync_solve({mu1, mu2, 2, 2, lam, 4});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].s == doctest::Approx(std::sqrt(X)).epsilon(1e-10));
    CHECK(pts[0].t == doctest::Approx(std::sqrt(Y)).epsilon(1e-10));
  }
  SUBCASE("serial and parallel agree") {
    SyncOptions par;
    par.exec = Exec::parallel;
    const SyncInstance inst{1, 2, 1.5, 1.5, -0.1, 6};
    const auto a = sync_solve(inst);
    const auto b = sync_solve(inst, par);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].s == b[i].s);
      CHECK(a[i].t == b[i].t);
    }
  }
}

TEST_CASE("threshold") {
  SUBCASE("equal masses: closed form -1/2") {
    const ThresholdBracket b = sync_threshold(1, 1, 2, 2, 4);
    CHECK(b.upper - b.lower <= 1e-9);
    CHECK(std::fabs(b.lambda_star() + 0.5) <= 1e-6);
    CHECK(sync_solve({1, 1, 2, 2, b.lambda_star() - 1e-3, 4}).empty());
    CHECK_FALSE(sync_solve({1, 1, 2, 2, b.lambda_star() + 1e-3, 4}).empty());
  }
  SUBCASE("mu2 = 100 mu1 against the brute scan") {
    const double ls = sync_threshold(1, 100, 2, 2, 4).lambda_star();
    CHECK(std::isfinite(ls));
    CHECK(ls < 0);
    CHECK(oracle::rel(ls, closed_form_threshold(1, 100)) <= 1e-6);
    CHECK(sync_brute_scan({1, 100, 2, 2, ls + 1e-2, 4}) > 0);
    CHECK(sync_brute_scan({1, 100, 2, 2, ls - 1e-2, 4}) == 0);
  }
  SUBCASE("scale covariance") {
    const double a = sync_threshold(1, 2, 2, 2, 4).lambda_star();
    const double b = sync_threshold(4, 8, 2, 2, 4).lambda_star();
    CHECK(oracle::rel(b, 4 * a) <= 1e-6);
  }
}

TEST_CASE("brute scan counts") {
  CHECK(sync_brute_scan({1, 1, 2, 2, -0.25, 4}, 300) >= 1);
  CHECK(sync_brute_scan({1, 1, 2, 2, -0.6, 4}, 300) == 0);
}

TEST_CASE("fixed-point freeness") {
  CHECK(fixed_point_free(1, 2, -0.5));
  CHECK_FALSE(fixed_point_free(1, 2, -0.4));
  CHECK(fixed_point_free(2, 1.5, -1.4));
  CHECK_FALSE(fixed_point_free(2, 1.5, -4.0 / 3 + 1e-9));
}

TEST_CASE("plane coefficients") {
  const PlaneCoeffs c = plane_coeffs(1, 1, 1, 4, 2, 2);
  CHECK(c.b1 == 1.0);
  CHECK(c.b2 == 1.0);
  CHECK(c.e(1.3, 0.7) == doctest::Approx(1.69 + 0.49 - std::pow(1.3, 4) - std::pow(0.7, 4) + 1.69 * 0.49));
  CHECK(c.es(1, 1) == doctest::Approx(0.0));
  CHECK(c.et(1, 1) == doctest::Approx(0.0));
  const auto [r1, r2] = c.constraint_residuals();
  CHECK(r1 == 0.0);
  CHECK(r2 == 0.0);
  const PlaneCoeffs z = plane_coeffs(1.5, 0.7, 1e-12, 4, 2, 2);
  CHECK(z.b1 == doctest::Approx(2 * 1.5 / 4).epsilon(1e-11));
  CHECK(z.b2 == doctest::Approx(2 * 0.7 / 4).epsilon(1e-11));
  CHECK_THROWS_AS(plane_coeffs(1, 1, 1, 4, 2, 1.5).validate(), DomainError);

  // finite-difference oracle for the closed-form derivatives
  const PlaneCoeffs q = plane_coeffs(0.8, 1.7, 0.4, 3.5, 1.5, 2.0);
  const double s = 0.9, t = 1.2, h = 1e-6;
  CHECK(q.es(s, t) == doctest::Approx((q.e(s + h, t) - q.e(s - h, t)) / (2 * h)).epsilon(1e-7));
  CHECK(q.et(s, t) == doctest::Approx((q.e(s, t + h) - q.e(s, t - h)) / (2 * h)).epsilon(1e-7));
  CHECK(q.ess(s, t) == doctest::Approx((q.es(s + h, t) - q.es(s - h, t)) / (2 * h)).epsilon(1e-7));
  CHECK(q.est(s, t) == doctest::Approx((q.es(s, t + h) - q.es(s, t - h)) / (2 * h)).epsilon(1e-7));
  CHECK(q.ett(s, t) == doctest::Approx((q.et(s, t + h) - q.et(s, t - h)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("plane box") {
  const PlaneCoeffs c = plane_coeffs(1, 1, 1, 4, 2, 2);
  const PlaneBox b = plane_box(c);
  CHECK(b.r < 1.0);
  CHECK(b.R > 1.0);
  CHECK(b.delta > 0.0);
  CHECK(plane_box_check(c, b.r, b.R, 10000).ok());

  PlaneCoeffs c3 = c;
  for (double* x : {&c3.a1, &c3.a2, &c3.b1, &c3.b2, &c3.d}) *x *= 3;
  const BoxCheck k1 = plane_box_check(c, b.r, b.R), k3 = plane_box_check(c3, b.r, b.R);
  CHECK(k3.ok());
  CHECK(k3.lower_min == doctest::Approx(3 * k1.lower_min).epsilon(1e-12));

  CHECK_FALSE(plane_box_check(c, 0.25, 0.5).ok());
}

TEST_CASE("plane critical points") {
  SUBCASE("unit instance") {
    const PlaneReport rep = plane_critical_points(plane_coeffs(1, 1, 1, 4, 2, 2));
    REQUIRE(rep.points.size() == 1);
    CHECK(rep.points[0].s == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.points[0].t == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.points[0].kind == CriticalKind::strict_max);
    CHECK(rep.unique_at_one);
    CHECK(rep.global_max);
  }
  SUBCASE("symmetric instances have a symmetric critical set") {
    const PlaneReport rep = plane_critical_points(plane_coeffs(1.3, 1.3, 0.6, 4, 2, 2), 80, 200);
    for (const PlaneCritical& p : rep.points) {
      bool mirrored = false;
      for (const PlaneCritical& q : rep.points)
        mirrored |= std::fabs(q.s - p.t) < 1e-8 && std::fabs(q.t - p.s) < 1e-8;
      CHECK(mirrored);
    }
    CHECK(rep.unique_at_one);
  }
  SUBCASE("random instances") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> a(0.5, 2), d(0.1, 1);
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
      const PlaneCoeffs c = plane_coeffs(a(rng), a(rng), d(rng), 4, 2, 2);
      const PlaneReport rep = plane_critical_points(c, 60, 200, Exec::parallel);
      if (!rep.all_strict_max) continue;
      ++checked;
      CHECK(rep.unique_at_one);
      CHECK(rep.global_max);
    }
    CHECK(checked > 0);
  }
}
