#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// |S^k| by the recursion |S^k| = 2π/(k-1) |S^{k-2}| from |S^0| = 2, |S^1| = 2π.
inline double sphere_area(int k) {
  double a = (k % 2 == 0) ? 2.0 : 2.0 * std::numbers::pi;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) a *= 2.0 * std::numbers::pi / (j - 1);
  return a;
}

/// Trapezoid sum of f(θ)·w(θ) on the grid nodes with exact orbit weights;
/// only second-order accurate, used where exactness is not needed.
inline double trapezoid(const std::vector<double>& f, const std::vector<double>& w, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    s += (i == 0 || i + 1 == f.size() ? 0.5 : 1.0) * f[i] * w[i];
  return s * h;
}

inline std::vector<double> uniform(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace oracle
