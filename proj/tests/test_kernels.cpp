#include <doctest.h>

#include <random>

#include "nehari/kernels.hpp"
#include "oracles.hpp"

using namespace nehari::kernels;

TEST_CASE("serial and OpenMP kernels agree") {
  for (std::size_t n : {1u, 7u, 1000u, 100001u}) {
    std::mt19937_64 rng(n);
    const auto q = oracle::uniform(n, rng, 0, 1);
    const auto a = oracle::uniform(n, rng, -1, 1);
    const auto b = oracle::uniform(n, rng, -1, 1);
    CAPTURE(n);
    CHECK(omp::weighted_sum(q, a) == doctest::Approx(serial::weighted_sum(q, a)).epsilon(1e-12));
    CHECK(omp::weighted_dot(q, a, b) ==
          doctest::Approx(serial::weighted_dot(q, a, b)).epsilon(1e-12));
    CHECK(omp::weighted_abs_pow(q, a, 3.0) ==
          doctest::Approx(serial::weighted_abs_pow(q, a, 3.0)).epsilon(1e-12));
    CHECK(omp::weighted_mixed(q, a, b, 1.5, 1.5) ==
          doctest::Approx(serial::weighted_mixed(q, a, b, 1.5, 1.5)).epsilon(1e-12));
    if (n > 1) {
      const std::span<const double> k(q.data(), n - 1);
      CHECK(omp::cell_form(k, a, b) == doctest::Approx(serial::cell_form(k, a, b)).epsilon(1e-12));
    }
    const PowerSums ps = serial::power_sums(q, a, b, 4.0, 2.0, 2.0);
    const PowerSums po = omp::power_sums(q, a, b, 4.0, 2.0, 2.0);
    CHECK(po.u_crit == doctest::Approx(ps.u_crit).epsilon(1e-12));
    CHECK(po.v_crit == doctest::Approx(ps.v_crit).epsilon(1e-12));
    CHECK(po.coupling == doctest::Approx(ps.coupling).epsilon(1e-12));
  }
}

TEST_CASE("kernels against direct loops") {
  std::mt19937_64 rng(3);
  const std::size_t n = 513;
  const auto q = oracle::uniform(n, rng, 0, 1);
  const auto u = oracle::uniform(n, rng, -2, 2);
  const auto v = oracle::uniform(n, rng, -2, 2);
  long double s4 = 0, s6 = 0, mix = 0, cell = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double a = std::fabs(u[i]), b = std::fabs(v[i]);
    s4 += q[i] * a * a * a * a;
    s6 += q[i] * std::pow(b, 2.5L);
    mix += q[i] * a * a * b * b;
  }
  for (std::size_t c = 0; c + 1 < n; ++c) cell += q[c] * (u[c + 1] - u[c]) * (v[c + 1] - v[c]);
  for (Exec e : {Exec::serial, Exec::parallel}) {
    CHECK(weighted_abs_pow(e, q, u, 4.0) == doctest::Approx(double(s4)).epsilon(1e-13));
    CHECK(weighted_abs_pow(e, q, v, 2.5) == doctest::Approx(double(s6)).epsilon(1e-13));
    CHECK(weighted_mixed(e, q, u, v, 2.0, 2.0) == doctest::Approx(double(mix)).epsilon(1e-13));
    CHECK(cell_form(e, std::span<const double>(q.data(), n - 1), u, v) ==
          doctest::Approx(double(cell)).epsilon(1e-12));
  }
  CHECK(abs_pow(-3.0, 2.0) == 9.0);
  CHECK(abs_pow(0.0, 2.5) == 0.0);
  CHECK(omp::max_threads() >= 1);
}
