#include "nehari/kernels.hpp"

namespace nehari::kernels::serial {
namespace {

// Neumaier compensated accumulator; the solver's line search compares
// energies that differ by a few ulps near convergence.
struct Accumulator {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

double weighted_sum(std::span<const double> q, std::span<const double> f) {
  Accumulator s;
  for (std::size_t i = 0; i < q.size(); ++i) s.add(q[i] * f[i]);
  return s.value();
}

double weighted_dot(std::span<const double> q, std::span<const double> a,
                    std::span<const double> b) {
  Accumulator s;
  for (std::size_t i = 0; i < q.size(); ++i) s.add(q[i] * a[i] * b[i]);
  return s.value();
}

double weighted_abs_pow(std::span<const double> q, std::span<const double> u, double p) {
  Accumulator s;
  for (std::size_t i = 0; i < q.size(); ++i) s.add(q[i] * abs_pow(u[i], p));
  return s.value();
}

double weighted_mixed(std::span<const double> q, std::span<const double> u,
                      std::span<const double> v, double a, double b) {
  Accumulator s;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (u[i] == 0.0 || v[i] == 0.0) continue;
    s.add(q[i] * abs_pow(u[i], a) * abs_pow(v[i], b));
  }
  return s.value();
}

double cell_form(std::span<const double> k, std::span<const double> a,
                 std::span<const double> b) {
  Accumulator s;
  for (std::size_t c = 0; c < k.size(); ++c) s.add(k[c] * (a[c + 1] - a[c]) * (b[c + 1] - b[c]));
  return s.value();
}

PowerSums power_sums(std::span<const double> q, std::span<const double> u,
                     std::span<const double> v, double crit, double alpha, double beta) {
  Accumulator su, sv, sc;
  for (std::size_t i = 0; i < q.size(); ++i) {
    su.add(q[i] * abs_pow(u[i], crit));
    sv.add(q[i] * abs_pow(v[i], crit));
    if (u[i] != 0.0 && v[i] != 0.0) sc.add(q[i] * abs_pow(u[i], alpha) * abs_pow(v[i], beta));
  }
  return {su.value(), sv.value(), sc.value()};
}

}  // namespace nehari::kernels::serial
