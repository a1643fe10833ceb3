#include "nehari/separation.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {
namespace {

constexpr double kZeroFraction = 1e-12;

std::vector<int> signs(const ReducedProfile& w) {
  double peak = 0.0;
  for (double x : w) peak = std::max(peak, std::fabs(x));
  const double eps = kZeroFraction * peak;
  std::vector<int> s(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > eps) s[i] = 1;
    if (w[i] < -eps) s[i] = -1;
  }
  return s;
}

// One contiguous run of `sign` that contains node 0 or the last node.
bool is_end_arc(const std::vector<int>& s, int sign) {
  std::size_t lo = s.size(), hi = 0, count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != sign) continue;
    lo = std::min(lo, i);
    hi = i;
    ++count;
  }
  if (count == 0 || hi - lo + 1 != count) return false;
  return lo == 0 || hi + 1 == s.size();
}

std::optional<double> try_interface(const PairState& pair, const ReducedGrid& grid) {
  try {
    return interface_locate(pair, grid);
  } catch (const TopologyError&) {
    return std::nullopt;
  }
}

ReducedProfile difference(const PairState& pair) {
  ReducedProfile w(pair.u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = pair.u[i] - pair.v[i];
  return w;
}

}  // namespace

void SweepSchedule::validate() const {
  if (lambdas.empty()) throw DomainError("sweep schedule is empty");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < 0.0) || !std::isfinite(lambdas[i]))
      throw DomainError("sweep schedule: every lambda must be finite and negative");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1]))
      throw DomainError("sweep schedule must be strictly decreasing");
  }
}

SweepSchedule SweepSchedule::geometric(double first, double last, int count) {
  if (!(first < 0.0) || !(last < first) || count < 2)
    throw DomainError("geometric schedule needs first < 0, last < first and count >= 2");
  SweepSchedule s;
  const double r = std::log(last / first) / (count - 1);
  for (int i = 0; i < count; ++i) s.lambdas.push_back(first * std::exp(r * i));
  s.lambdas.back() = last;
  return s;
}

SweepRecord make_record(const PairState& pair, const CouplingParams& cp,
                        const ReducedGrid& grid) {
  SweepRecord r;
  r.lambda = cp.lambda;
  const PairIntegrals I = pair_integrals(pair, cp, grid);
  r.energy = energy_from(I, cp, grid.params().crit());
  r.overlap = I.coupling;
  r.lambda_overlap = -cp.lambda * I.coupling;
  for (std::size_t i = 0; i < pair.u.size(); ++i)
    r.max_product = std::max(r.max_product, pair.u[i] * pair.v[i]);
  r.interface_theta = try_interface(pair, grid);
  return r;
}

SweepOutcome sweep_lambda(const SweepSchedule& schedule, const CouplingParams& cp_base,
                          const ReducedGrid& grid, const SolveOptions& opts,
                          const std::optional<SweepResume>& resume, const SweepHooks& hooks) {
  schedule.validate();
  opts.validate();
  SweepOutcome out;
  if (resume) {
    if (resume->records.size() > schedule.lambdas.size())
      throw DomainError("resume state has more records than the schedule");
    for (std::size_t i = 0; i < resume->records.size(); ++i)
      if (resume->records[i].lambda != schedule.lambdas[i])
        throw DomainError("resume state does not match the schedule");
    check_pair(resume->warm, grid);
    out.records = resume->records;
    out.last_pair = resume->warm;
  }

  for (std::size_t i = out.records.size(); i < schedule.lambdas.size(); ++i) {
    CouplingParams cp = cp_base;
    cp.lambda = schedule.lambdas[i];
    cp.validate(grid.params().N, true);
    const PairState init =
        out.last_pair ? *out.last_pair : initial_guess(InitKind::bumps, grid, opts.seed);
    PairObserver obs;
    if (hooks.on_iterate)
      obs = [&hooks, i](const PairState& p, int k) { hooks.on_iterate(i, p, k); };
    SweepRecord rec;
    try {
      SolveResult res = minimize_nehari(init, cp, grid, opts, obs);
      rec = make_record(res.pair, cp, grid);
      rec.iters = res.iterations;
      rec.grad_norm = res.grad_norm;
      rec.converged = res.converged;
      rec.status = res.status;
      out.last_pair = std::move(res.pair);
    } catch (const Error& e) {
      rec.lambda = cp.lambda;
      rec.failed = true;
      rec.status = std::string("failed: ") + e.what();
      if (const auto* c = dynamic_cast<const CollapseError*>(&e)) rec.iters = c->iteration();
    }
    out.records.push_back(rec);
    if (hooks.on_record) hooks.on_record(rec, out.last_pair);
  }

  if (out.last_pair) {
    CouplingParams cp = cp_base;
    cp.lambda = schedule.lambdas.back();
    LimitRow row;
    try {
      LimitResult lim = minimize_limit(difference(*out.last_pair), cp, grid, opts);
      row.energy = lim.energy;
      row.grad_norm = lim.grad_norm;
      row.iters = lim.iterations;
      row.converged = lim.converged;
      row.status = lim.status;
      try {
        row.interface_theta = interface_locate(lim.w, grid);
      } catch (const TopologyError&) {
      }
      row.w = std::move(lim.w);
    } catch (const Error& e) {
      row.status = std::string("failed: ") + e.what();
    }
    out.limit = std::move(row);
  }
  return out;
}

int count_crossings(const ReducedProfile& w) {
  int crossings = 0, prev = 0;
  for (int s : signs(w)) {
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++crossings;
    prev = s;
  }
  return crossings;
}

double interface_locate(const ReducedProfile& w, const ReducedGrid& grid) {
  check_profile(w, grid);
  const int crossings = count_crossings(w);
  if (crossings != 1)
    throw TopologyError("expected exactly one sign change, found " + std::to_string(crossings),
                        crossings);
  const std::vector<int> s = signs(w);
  const auto theta = grid.nodes();
  std::size_t a = 0;
  while (s[a] == 0) ++a;
  std::size_t b = a + 1;
  for (;; ++b) {
    if (s[b] == 0) continue;
    if (s[b] != s[a]) break;
    a = b;
  }
  return theta[a] + (theta[b] - theta[a]) * w[a] / (w[a] - w[b]);
}

double interface_locate(const PairState& pair, const ReducedGrid& grid) {
  check_pair(pair, grid);
  return interface_locate(difference(pair), grid);
}

ToriReport verify_tori(const ReducedProfile& w, const ReducedGrid& grid) {
  check_profile(w, grid);
  ToriReport r;
  const std::vector<int> s = signs(w);
  r.crossings = count_crossings(w);
  r.positive_arc = is_end_arc(s, 1);
  r.negative_arc = is_end_arc(s, -1);
  const auto first = std::find_if(s.begin(), s.end(), [](int x) { return x != 0; });
  if (first != s.end()) r.touches_zero = *first > 0 ? "positive" : "negative";
  if (r.crossings == 1) {
    r.theta0 = interface_locate(w, grid);
    // Zero nodes are allowed only between the two arcs.
    const auto last = std::find_if(s.rbegin(), s.rend(), [](int x) { return x != 0; });
    r.complementary = r.positive_arc && r.negative_arc && first == s.begin() &&
                      last == s.rbegin();
  }
  return r;
}

}  // namespace nehari
