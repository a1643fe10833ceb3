#include "nehari/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nehari/errors.hpp"
#include "nehari/functional.hpp"

namespace nehari {
namespace {

constexpr int kNewtonIters = 200;
constexpr int kPolishIters = 3;

struct SyncEval {
  double f1, f2;
  double j11, j12, j21, j22;  // derivatives in (log s, log t)
  double scale1, scale2;
};

SyncEval sync_eval(const SyncInstance& in, double s, double t) {
  const double c = in.crit();
  const double A = in.mu1 * std::pow(s, c - 2.0);
  const double B = in.lambda * in.alpha * std::pow(s, in.alpha - 2.0) * std::pow(t, in.beta);
  const double C = in.mu2 * std::pow(t, c - 2.0);
  const double D = in.lambda * in.beta * std::pow(s, in.alpha) * std::pow(t, in.beta - 2.0);
  SyncEval e;
  e.f1 = A + B - 1.0;
  e.f2 = C + D - 1.0;
  e.j11 = (c - 2.0) * A + (in.alpha - 2.0) * B;
  e.j12 = in.beta * B;
  e.j21 = in.alpha * D;
  e.j22 = (c - 2.0) * C + (in.beta - 2.0) * D;
  e.scale1 = 1.0 + std::fabs(A) + std::fabs(B);
  e.scale2 = 1.0 + std::fabs(C) + std::fabs(D);
  return e;
}

double merit(const SyncEval& e) {
  return std::max(std::fabs(e.f1) / e.scale1, std::fabs(e.f2) / e.scale2);
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> x(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) x[i] = std::exp(a + (b - a) * i / (n - 1));
  return x;
}

std::optional<SyncPoint> sync_newton(const SyncInstance& in, double s0, double t0,
                                     const SyncOptions& o) {
  double x = std::log(s0), y = std::log(t0);
  SyncEval e = sync_eval(in, s0, t0);
  double m = merit(e);
  int polish = -1;
  for (int it = 0; it < kNewtonIters; ++it) {
    if (m <= o.residual_tol && polish < 0) polish = 0;
    if (polish >= kPolishIters) break;
    const double det = e.j11 * e.j22 - e.j12 * e.j21;
    if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) return std::nullopt;
    double dx = -(e.j22 * e.f1 - e.j12 * e.f2) / det;
    double dy = -(e.j11 * e.f2 - e.j21 * e.f1) / det;
    const double big = std::max(std::fabs(dx), std::fabs(dy));
    if (big > 1.0) {
      dx /= big;
      dy /= big;
    }
    double tau = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 30; ++bt) {
      const SyncEval trial = sync_eval(in, std::exp(x + tau * dx), std::exp(y + tau * dy));
      const double mt = merit(trial);
      if (std::isfinite(mt) && (mt < m || (polish >= 0 && mt <= m))) {
        x += tau * dx;
        y += tau * dy;
        e = trial;
        m = mt;
        moved = true;
        break;
      }
      tau *= 0.5;
    }
    if (polish >= 0) ++polish;
    if (!moved && polish < 0) return std::nullopt;
  }
  if (!(m <= o.residual_tol)) return std::nullopt;
  const SyncPoint p{std::exp(x), std::exp(y)};
  if (p.s < o.box_lo || p.s > o.box_hi || p.t < o.box_lo || p.t > o.box_hi) return std::nullopt;
  return p;
}

bool close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

// Common zero of two bilinear interpolants on the unit square, given the
// corner values f[k] = {f00, f10, f01, f11}.
bool bilinear_common_zero(const double f[4], const double g[4]) {
  const double A1 = f[0], B1 = f[1] - f[0], C1 = f[2] - f[0], D1 = f[3] - f[1] - f[2] + f[0];
  const double A2 = g[0], B2 = g[1] - g[0], C2 = g[2] - g[0], D2 = g[3] - g[1] - g[2] + g[0];
  const double q2 = B1 * D2 - B2 * D1;
  const double q1 = A1 * D2 + B1 * C2 - A2 * D1 - B2 * C1;
  const double q0 = A1 * C2 - A2 * C1;
  double roots[2];
  int nr = 0;
  const double qs = std::fabs(q0) + std::fabs(q1) + std::fabs(q2);
  if (std::fabs(q2) <= 1e-14 * qs) {
    if (std::fabs(q1) > 1e-14 * qs) roots[nr++] = -q0 / q1;
  } else {
    const double disc = q1 * q1 - 4.0 * q2 * q0;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    const double qq = -0.5 * (q1 + std::copysign(sq, q1));
    roots[nr++] = qq / q2;
    if (qq != 0.0) roots[nr++] = q0 / qq;
  }
  for (int k = 0; k < nr; ++k) {
    const double a = roots[k];
    if (a < 0.0 || a > 1.0) continue;
    const double den1 = C1 + D1 * a, den2 = C2 + D2 * a;
    double b;
    if (std::fabs(den1) >= std::fabs(den2)) {
      if (den1 == 0.0) continue;
      b = -(A1 + B1 * a) / den1;
    } else {
      b = -(A2 + B2 * a) / den2;
    }
    if (b >= 0.0 && b <= 1.0) return true;
  }
  return false;
}

bool changes_sign(const double f[4]) {
  const double lo = std::min({f[0], f[1], f[2], f[3]});
  const double hi = std::max({f[0], f[1], f[2], f[3]});
  return lo <= 0.0 && hi >= 0.0;
}

}  // namespace

void SyncInstance::validate() const {
  CouplingParams{mu1, mu2, alpha, beta, lambda}.validate(N, true);
}

std::pair<double, double> sync_residuals(const SyncInstance& inst, SyncPoint p) {
  const SyncEval e = sync_eval(inst, p.s, p.t);
  return {e.f1 / e.scale1, e.f2 / e.scale2};
}

std::vector<SyncPoint> sync_solve(const SyncInstance& inst, const SyncOptions& opts) {
  inst.validate();
  const int n = opts.starts_per_axis;
  if (n < 2) throw DomainError("sync_solve needs at least 2 starts per axis");
  const std::vector<double> grid = log_space(opts.box_lo, opts.box_hi, n);
  std::vector<std::optional<SyncPoint>> found(static_cast<std::size_t>(n) * n);
  const long total = static_cast<long>(found.size());
#pragma omp parallel for schedule(dynamic, 8) if (opts.exec == Exec::parallel)
  for (long k = 0; k < total; ++k)
    found[k] = sync_newton(inst, grid[k / n], grid[k % n], opts);

  std::vector<SyncPoint> pts;
  for (const auto& f : found)
    if (f) pts.push_back(*f);
  std::sort(pts.begin(), pts.end(),
            [](SyncPoint a, SyncPoint b) { return a.s < b.s || (a.s == b.s && a.t < b.t); });
  std::vector<SyncPoint> out;
  for (const SyncPoint& p : pts) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](SyncPoint q) {
      return close(p.s, q.s, opts.dedup) && close(p.t, q.t, opts.dedup);
    });
    if (!dup) out.push_back(p);
  }
  return out;
}

ThresholdBracket sync_threshold(double mu1, double mu2, double alpha, double beta, int N,
                                double width, const SyncOptions& opts) {
  if (!(width > 0.0)) throw DomainError("sync_threshold: width must be positive");
  auto empty_at = [&](double lambda) {
    return sync_solve(SyncInstance{mu1, mu2, alpha, beta, lambda, N}, opts).empty();
  };
  ThresholdBracket b{-1e6, -1e-6};
  if (empty_at(b.upper) || !empty_at(b.lower))
    throw BracketError("sync_threshold: no emptiness change in [-1e6, -1e-6]");
  while (b.upper - b.lower > width) {
    const double mid = 0.5 * (b.lower + b.upper);
    (empty_at(mid) ? b.lower : b.upper) = mid;
  }
  return b;
}

long sync_brute_scan(const SyncInstance& inst, int points, const SyncOptions& opts) {
  inst.validate();
  if (points < 2) throw DomainError("sync_brute_scan needs at least 2 points per axis");
  const std::vector<double> ax = log_space(opts.box_lo, opts.box_hi, points);
  const std::size_t P = static_cast<std::size_t>(points);
  std::vector<double> F1(P * P), F2(P * P);
  const long total = static_cast<long>(P * P);
#pragma omp parallel for schedule(static) if (opts.exec == Exec::parallel)
  for (long k = 0; k < total; ++k) {
    const SyncEval e = sync_eval(inst, ax[k / points], ax[k % points]);
    F1[k] = e.f1;
    F2[k] = e.f2;
  }
  long cells = 0;
  const long rows = points - 1;
#pragma omp parallel for schedule(static) reduction(+ : cells) if (opts.exec == Exec::parallel)
  for (long i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j + 1 < P; ++j) {
      const std::size_t k00 = i * P + j, k10 = (i + 1) * P + j;
      const double f[4] = {F1[k00], F1[k10], F1[k00 + 1], F1[k10 + 1]};
      const double g[4] = {F2[k00], F2[k10], F2[k00 + 1], F2[k10 + 1]};
      if (changes_sign(f) && changes_sign(g) && bilinear_common_zero(f, g)) ++cells;
    }
  }
  return cells;
}

bool fixed_point_free(double mu, double alpha, double lambda) {
  if (!(mu > 0.0)) throw DomainError("fixed_point_free: mu must be positive");
  return lambda <= -mu / alpha;
}

void PlaneCoeffs::validate() const {
  if (!(a1 > 0.0 && a2 > 0.0 && b1 > 0.0 && b2 > 0.0 && d > 0.0))
    throw DomainError("PlaneCoeffs: a1, a2, b1, b2, d must be positive");
  if (!(p > 2.0)) throw DomainError("PlaneCoeffs: p must exceed 2");
  if (!(alpha > 1.0 && beta > 1.0)) throw DomainError("PlaneCoeffs: alpha, beta must exceed 1");
  if (std::fabs(alpha + beta - p) > 1e-12 * p)
    throw DomainError("PlaneCoeffs: alpha + beta must equal p");
}

std::pair<double, double> PlaneCoeffs::constraint_residuals() const {
  return {2.0 * a1 - p * b1 + d * alpha, 2.0 * a2 - p * b2 + d * beta};
}

double PlaneCoeffs::e(double s, double t) const {
  return a1 * s * s + a2 * t * t - b1 * std::pow(s, p) - b2 * std::pow(t, p) +
         d * std::pow(s, alpha) * std::pow(t, beta);
}
double PlaneCoeffs::es(double s, double t) const {
  return 2.0 * a1 * s - p * b1 * std::pow(s, p - 1.0) +
         d * alpha * std::pow(s, alpha - 1.0) * std::pow(t, beta);
}
double PlaneCoeffs::et(double s, double t) const {
  return 2.0 * a2 * t - p * b2 * std::pow(t, p - 1.0) +
         d * beta * std::pow(s, alpha) * std::pow(t, beta - 1.0);
}
double PlaneCoeffs::ess(double s, double t) const {
  return 2.0 * a1 - p * (p - 1.0) * b1 * std::pow(s, p - 2.0) +
         d * alpha * (alpha - 1.0) * std::pow(s, alpha - 2.0) * std::pow(t, beta);
}
double PlaneCoeffs::est(double s, double t) const {
  return d * alpha * beta * std::pow(s, alpha - 1.0) * std::pow(t, beta - 1.0);
}
double PlaneCoeffs::ett(double s, double t) const {
  return 2.0 * a2 - p * (p - 1.0) * b2 * std::pow(t, p - 2.0) +
         d * beta * (beta - 1.0) * std::pow(s, alpha) * std::pow(t, beta - 2.0);
}

PlaneCoeffs plane_coeffs(double a1, double a2, double d, double p, double alpha, double beta) {
  if (!(a1 > 0.0 && a2 > 0.0 && d > 0.0 && p > 0.0))
    throw DomainError("plane_coeffs: a1, a2, d, p must be positive");
  PlaneCoeffs c;
  c.a1 = a1;
  c.a2 = a2;
  c.d = d;
  c.p = p;
  c.alpha = alpha;
  c.beta = beta;
  c.b1 = (2.0 * a1 + d * alpha) / p;
  c.b2 = (2.0 * a2 + d * beta) / p;
  c.validate();
  return c;
}

BoxCheck plane_box_check(const PlaneCoeffs& c, double r, double R, int points) {
  if (!(0.0 < r && r < R) || points < 2) throw DomainError("plane_box_check: need 0 < r < R");
  BoxCheck b;
  b.lower_min = std::numeric_limits<double>::infinity();
  b.upper_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    const double x = r + (R - r) * i / (points - 1);
    b.lower_min = std::min({b.lower_min, c.es(r, x), c.et(x, r)});
    b.upper_max = std::max({b.upper_max, c.es(R, x), c.et(x, R)});
  }
  return b;
}

PlaneBox plane_box(const PlaneCoeffs& c, int points) {
  c.validate();
  for (int kR = 1; kR <= 19; ++kR) {
    for (int kr = 1; kr <= 19; ++kr) {
      const double r = std::ldexp(1.0, -kr), R = std::ldexp(1.0, kR);
      const BoxCheck b = plane_box_check(c, r, R, points);
      if (b.ok()) return {r, R, b.lower_min};
    }
  }
  throw DomainError("plane_box: no admissible (r, R) within [1e-6, 1e6]");
}

std::string to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::strict_max: return "strict_max";
    case CriticalKind::strict_min: return "strict_min";
    case CriticalKind::saddle: return "saddle";
    case CriticalKind::degenerate: return "degenerate";
  }
  return "degenerate";
}

PlaneReport plane_critical_points(const PlaneCoeffs& c, int starts, int verify_points,
                                  Exec exec) {
  PlaneReport rep;
  rep.box = plane_box(c);
  const double r = rep.box.r, R = rep.box.R;
  const std::vector<double> ax = log_space(r, R, starts);

  auto grad_scale = [&](double s, double t) {
    return 1.0 + std::fabs(2.0 * c.a1 * s) + std::fabs(c.p * c.b1 * std::pow(s, c.p - 1.0)) +
           std::fabs(2.0 * c.a2 * t) + std::fabs(c.p * c.b2 * std::pow(t, c.p - 1.0)) +
           std::fabs(c.d * c.p * std::pow(s, c.alpha) * std::pow(t, c.beta));
  };
  auto newton = [&](double s, double t) -> std::optional<PlaneCritical> {
    int polish = -1;
    for (int it = 0; it < kNewtonIters && polish < kPolishIters; ++it) {
      const double gs = c.es(s, t), gt = c.et(s, t);
      if (std::hypot(gs, gt) <= 1e-13 * grad_scale(s, t) && polish < 0) polish = 0;
      const double hss = c.ess(s, t), hst = c.est(s, t), htt = c.ett(s, t);
      const double det = hss * htt - hst * hst;
      if (!(std::fabs(det) > 0.0)) return std::nullopt;
      double ds = -(htt * gs - hst * gt) / det, dt = -(hss * gt - hst * gs) / det;
      // Halve until the step stays inside the open quadrant and moves by
      // at most half the current coordinates.
      double tau = 1.0;
      while (tau > 1e-12 &&
             (std::fabs(tau * ds) > 0.5 * s || std::fabs(tau * dt) > 0.5 * t))
        tau *= 0.5;
      s += tau * ds;
      t += tau * dt;
      if (polish >= 0) ++polish;
    }
    // Starts that slide onto an axis converge to critical points of the
    // boundary, which lie outside the open quadrant.
    if (polish < 0 || std::min(s, t) < 1e-6 * r) return std::nullopt;
    return PlaneCritical{s, t, CriticalKind::degenerate};
  };

  std::vector<std::optional<PlaneCritical>> found(static_cast<std::size_t>(starts) * starts);
  const long total = static_cast<long>(found.size());
#pragma omp parallel for schedule(dynamic, 64) if (exec == Exec::parallel)
  for (long k = 0; k < total; ++k) found[k] = newton(ax[k / starts], ax[k % starts]);

  std::vector<PlaneCritical> pts;
  for (const auto& f : found)
    if (f) pts.push_back(*f);
  std::sort(pts.begin(), pts.end(), [](const PlaneCritical& a, const PlaneCritical& b) {
    return a.s < b.s || (a.s == b.s && a.t < b.t);
  });
  for (const PlaneCritical& p : pts) {
    const bool dup = std::any_of(rep.points.begin(), rep.points.end(), [&](const auto& q) {
      return close(p.s, q.s, 1e-8) && close(p.t, q.t, 1e-8);
    });
    if (dup) continue;
    PlaneCritical q = p;
    const double hss = c.ess(q.s, q.t), hst = c.est(q.s, q.t), htt = c.ett(q.s, q.t);
    const double det = hss * htt - hst * hst;
    const double tol = 1e-10 * (std::fabs(hss * htt) + hst * hst);
    if (det > tol)
      q.kind = hss < 0.0 ? CriticalKind::strict_max : CriticalKind::strict_min;
    else if (det < -tol)
      q.kind = CriticalKind::saddle;
    rep.points.push_back(q);
  }

  rep.all_strict_max = std::all_of(rep.points.begin(), rep.points.end(), [](const auto& q) {
    return q.kind == CriticalKind::strict_max;
  });
  rep.unique_at_one = rep.all_strict_max && rep.points.size() == 1 &&
                      std::fabs(rep.points[0].s - 1.0) <= 1e-8 &&
                      std::fabs(rep.points[0].t - 1.0) <= 1e-8;

  const std::vector<double> vx = log_space(r, R, verify_points);
  double gmax = -std::numeric_limits<double>::infinity();
  const long vp = verify_points;
#pragma omp parallel for schedule(static) reduction(max : gmax) if (exec == Exec::parallel)
  for (long i = 0; i < vp; ++i)
    for (long j = 0; j < vp; ++j) gmax = std::max(gmax, c.e(vx[i], vx[j]));
  rep.grid_max = gmax;
  const double e11 = c.e(1.0, 1.0);
  rep.global_max = e11 >= gmax - 1e-12 * std::fabs(e11);
  return rep;
}

}  // namespace nehari
