#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace nehari::kernels {

/// |x|^p with integer fast paths for the exponents that occur for N = 4, 6.
inline double abs_pow(double x, double p) {
  const double a = std::fabs(x);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) return (a * a) * (a * a);
  if (a == 0.0) return 0.0;
  return std::pow(a, p);
}

/// Sums needed by one evaluation of the pair energy.
struct PowerSums {
  double u_crit = 0.0;   // Σ q |u|^{2*}
  double v_crit = 0.0;   // Σ q |v|^{2*}
  double coupling = 0.0; // Σ q |u|^α |v|^β
};

enum class Exec { serial, parallel };

// Reference implementations: plain left-to-right loops.
namespace serial {
double weighted_sum(std::span<const double> q, std::span<const double> f);
double weighted_dot(std::span<const double> q, std::span<const double> a,
                    std::span<const double> b);
double weighted_abs_pow(std::span<const double> q, std::span<const double> u, double p);
double weighted_mixed(std::span<const double> q, std::span<const double> u,
                      std::span<const double> v, double a, double b);
double cell_form(std::span<const double> k, std::span<const double> a,
                 std::span<const double> b);
PowerSums power_sums(std::span<const double> q, std::span<const double> u,
                     std::span<const double> v, double crit, double alpha, double beta);
}  // namespace serial

// OpenMP versions. Static schedule with per-thread partials combined in
// thread order, so results are reproducible for a fixed thread count.
namespace omp {
double weighted_sum(std::span<const double> q, std::span<const double> f);
double weighted_dot(std::span<const double> q, std::span<const double> a,
                    std::span<const double> b);
double weighted_abs_pow(std::span<const double> q, std::span<const double> u, double p);
double weighted_mixed(std::span<const double> q, std::span<const double> u,
                      std::span<const double> v, double a, double b);
double cell_form(std::span<const double> k, std::span<const double> a,
                 std::span<const double> b);
PowerSums power_sums(std::span<const double> q, std::span<const double> u,
                     std::span<const double> v, double crit, double alpha, double beta);
int max_threads();
}  // namespace omp

inline double weighted_sum(Exec e, std::span<const double> q, std::span<const double> f) {
  return e == Exec::parallel ? omp::weighted_sum(q, f) : serial::weighted_sum(q, f);
}
inline double weighted_dot(Exec e, std::span<const double> q, std::span<const double> a,
                           std::span<const double> b) {
  return e == Exec::parallel ? omp::weighted_dot(q, a, b) : serial::weighted_dot(q, a, b);
}
inline double weighted_abs_pow(Exec e, std::span<const double> q, std::span<const double> u,
                               double p) {
  return e == Exec::parallel ? omp::weighted_abs_pow(q, u, p)
                             : serial::weighted_abs_pow(q, u, p);
}
inline double weighted_mixed(Exec e, std::span<const double> q, std::span<const double> u,
                             std::span<const double> v, double a, double b) {
  return e == Exec::parallel ? omp::weighted_mixed(q, u, v, a, b)
                             : serial::weighted_mixed(q, u, v, a, b);
}
inline double cell_form(Exec e, std::span<const double> k, std::span<const double> a,
                        std::span<const double> b) {
  return e == Exec::parallel ? omp::cell_form(k, a, b) : serial::cell_form(k, a, b);
}
inline PowerSums power_sums(Exec e, std::span<const double> q, std::span<const double> u,
                            std::span<const double> v, double crit, double alpha,
                            double beta) {
  return e == Exec::parallel ? omp::power_sums(q, u, v, crit, alpha, beta)
                             : serial::power_sums(q, u, v, crit, alpha, beta);
}

}  // namespace nehari::kernels
