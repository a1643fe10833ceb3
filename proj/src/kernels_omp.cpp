#include <omp.h>

#include <vector>

#include "nehari/kernels.hpp"

namespace nehari::kernels::omp {
namespace {

// Deterministic parallel reduction: each thread sums a contiguous static
// block, partials are added in thread order.
template <typename Term>
double reduce(std::size_t n, Term term) {
  const int nt = omp_get_max_threads();
  std::vector<double> partial(static_cast<std::size_t>(nt), 0.0);
#pragma omp parallel num_threads(nt)
  {
    const int tid = omp_get_thread_num();
    double s = 0.0;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) s += term(static_cast<std::size_t>(i));
    partial[static_cast<std::size_t>(tid)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

double weighted_sum(std::span<const double> q, std::span<const double> f) {
  return reduce(q.size(), [&](std::size_t i) { return q[i] * f[i]; });
}

double weighted_dot(std::span<const double> q, std::span<const double> a,
                    std::span<const double> b) {
  return reduce(q.size(), [&](std::size_t i) { return q[i] * a[i] * b[i]; });
}

double weighted_abs_pow(std::span<const double> q, std::span<const double> u, double p) {
  return reduce(q.size(), [&](std::size_t i) { return q[i] * abs_pow(u[i], p); });
}

double weighted_mixed(std::span<const double> q, std::span<const double> u,
                      std::span<const double> v, double a, double b) {
  return reduce(q.size(), [&](std::size_t i) {
    if (u[i] == 0.0 || v[i] == 0.0) return 0.0;
    return q[i] * abs_pow(u[i], a) * abs_pow(v[i], b);
  });
}

double cell_form(std::span<const double> k, std::span<const double> a,
                 std::span<const double> b) {
  return reduce(k.size(),
                [&](std::size_t c) { return k[c] * (a[c + 1] - a[c]) * (b[c + 1] - b[c]); });
}

PowerSums power_sums(std::span<const double> q, std::span<const double> u,
                     std::span<const double> v, double crit, double alpha, double beta) {
  const int nt = omp_get_max_threads();
  std::vector<PowerSums> partial(static_cast<std::size_t>(nt));
#pragma omp parallel num_threads(nt)
  {
    PowerSums s;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(q.size()); ++j) {
      const auto i = static_cast<std::size_t>(j);
      s.u_crit += q[i] * abs_pow(u[i], crit);
      s.v_crit += q[i] * abs_pow(v[i], crit);
      if (u[i] != 0.0 && v[i] != 0.0) s.coupling += q[i] * abs_pow(u[i], alpha) * abs_pow(v[i], beta);
    }
    partial[static_cast<std::size_t>(omp_get_thread_num())] = s;
  }
  PowerSums out;
  for (const auto& p : partial) {
    out.u_crit += p.u_crit;
    out.v_crit += p.v_crit;
    out.coupling += p.coupling;
  }
  return out;
}

}  // namespace nehari::kernels::omp
