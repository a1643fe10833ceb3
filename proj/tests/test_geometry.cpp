#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/geometry.hpp"
#include "oracles.hpp"

using namespace nehari;
using std::numbers::pi;

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2 * pi).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(4 * pi).epsilon(1e-15));
  CHECK(sphere_area(4) == doctest::Approx(8 * pi * pi / 3).epsilon(1e-15));
  for (int k = 1; k <= 12; ++k) CHECK(oracle::rel(sphere_area(k), oracle::sphere_area(k)) < 1e-14);
}

TEST_CASE("orbit weight vanishes at both ends and integrates to the sphere area") {
  for (int N = 4; N <= 7; ++N)
    for (int m = 2; m <= N - 1; ++m) {
      const ModelParams p{N, m, N + 1 - m, 64};
      CHECK(orbit_weight(0.0, p) == 0.0);
      CHECK(std::fabs(orbit_weight(pi / 2, p)) < 1e-14);
      const double I = oracle::simpson([&](double t) { return orbit_weight(t, p); }, 0, pi / 2);
      CHECK(oracle::rel(I, oracle::sphere_area(N)) < 1e-12);
    }
  const ModelParams p{4, 2, 3, 64};
  CHECK(oracle::rel(oracle::simpson([&](double t) { return orbit_weight(t, p); }, 0, pi / 2),
                    2 * pi * 4 * pi / 3) < 1e-12);
}

TEST_CASE("integrate is exact for constants and linear") {
  for (int N = 4; N <= 8; ++N)
    for (int m = 2; m <= N - 1; ++m) {
      const ReducedGrid g({N, m, N + 1 - m, 32});
      CHECK(oracle::rel(integrate(ReducedProfile(g.size(), 1.0), g), oracle::sphere_area(N)) <
            1e-10);
    }
  const ReducedGrid g({4, 2, 3, 128});
  CHECK(oracle::rel(integrate(ReducedProfile(g.size(), 1.0), g), 8 * pi * pi / 3) < 1e-10);
  CHECK(integrate(ReducedProfile(g.size(), 0.0), g) == 0.0);
  CHECK(oracle::rel(integrate(ReducedProfile(g.size(), -2.5), g), -2.5 * 8 * pi * pi / 3) < 1e-10);

  std::mt19937_64 rng(1);
  const auto a = oracle::uniform(g.size(), rng, -1, 1);
  const auto b = oracle::uniform(g.size(), rng, -1, 1);
  ReducedProfile c(g.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2 * a[i] - 3 * b[i];
  CHECK(integrate(c, g) == doctest::Approx(2 * integrate(a, g) - 3 * integrate(b, g)).epsilon(1e-12));
}

TEST_CASE("integrate converges to the exact integral of a smooth profile") {
  // ∫ cos²θ w dθ against Simpson on the exact weight.
  const ModelParams p{4, 2, 3, 512};
  const ReducedGrid g(p);
  ReducedProfile f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(g.nodes()[i]) * std::cos(g.nodes()[i]);
  const double exact =
      oracle::simpson([&](double t) { return std::cos(t) * std::cos(t) * orbit_weight(t, p); }, 0,
                      pi / 2);
  CHECK(oracle::rel(integrate(f, g), exact) < 1e-5);
}

TEST_CASE("h1_form") {
  const ModelParams p{4, 2, 3, 256};
  const ReducedGrid g(p);
  const double area = oracle::sphere_area(4);

  SUBCASE("constants") {
    CHECK(oracle::rel(h1_form(ReducedProfile(g.size(), 1.5), ReducedProfile(g.size(), 1.5), g),
                      p.kappa() * 2.25 * area) < 1e-10);
  }
  SUBCASE("constant against a mean-free profile") {
    std::mt19937_64 rng(4);
    auto w = oracle::uniform(g.size(), rng, -1, 1);
    const double mean = integrate(w, g) / area;
    for (double& x : w) x -= mean;
    const double scale = h1_form(w, w, g);
    CHECK(std::fabs(h1_form(ReducedProfile(g.size(), 1.0), w, g)) < 1e-12 * scale);
  }
  SUBCASE("symmetry") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
      const auto a = oracle::uniform(g.size(), rng, -1, 1);
      const auto b = oracle::uniform(g.size(), rng, -1, 1);
      CHECK(h1_form(a, b, g) == doctest::Approx(h1_form(b, a, g)).epsilon(1e-14));
    }
  }
  SUBCASE("smooth profile against Simpson") {
    // f = cos 2θ: ∫ (4 sin²2θ + 2 cos²2θ) w dθ.
    const ModelParams fine{4, 2, 3, 1024};
    const ReducedGrid gf(fine);
    ReducedProfile f(gf.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(2 * gf.nodes()[i]);
    const double exact = oracle::simpson(
        [&](double t) {
          const double s = std::sin(2 * t), c = std::cos(2 * t);
          return (4 * s * s + fine.kappa() * c * c) * orbit_weight(t, fine);
        },
        0, pi / 2);
    CHECK(oracle::rel(h1_form(f, f, gf), exact) < 1e-5);
  }
}

TEST_CASE("apply_h1 matches h1_form and solve_h1 inverts it") {
  const ReducedGrid g({5, 3, 3, 200});
  std::mt19937_64 rng(6);
  const auto x = oracle::uniform(g.size(), rng, -1, 1);
  const auto z = oracle::uniform(g.size(), rng, -1, 1);
  std::vector<double> y(g.size());
  g.apply_h1(x, y);
  double zy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) zy += z[i] * y[i];
  CHECK(zy == doctest::Approx(h1_form(z, x, g)).epsilon(1e-12));
  g.solve_h1(y);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("Sobolev constant") {
  const double S4 = 8 * pi / std::sqrt(6.0);
  CHECK(oracle::rel(sobolev_constant(4), S4) < 1e-14);
  CHECK(sobolev_constant(4) == doctest::Approx(10.260398641294913).epsilon(1e-14));
  for (int N = 3; N <= 10; ++N)
    CHECK(oracle::rel(sobolev_constant(N), sobolev_constant_sphere(N)) < 1e-12);
  for (int N = 4; N <= 6; ++N) {
    const double k = N * (N - 2) / 4.0;
    CHECK(oracle::rel(std::pow(sobolev_constant(N), N / 2.0) / std::pow(k, N / 2.0),
                      oracle::sphere_area(N)) < 1e-12);
  }
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(ModelParams{4, 2, 3, 16}.validate());
  CHECK_THROWS_AS(ModelParams({3, 2, 2, 64}).validate(), DomainError);
  CHECK_THROWS_AS(ModelParams({4, 1, 4, 64}).validate(), DomainError);
  CHECK_THROWS_AS(ModelParams({4, 2, 2, 64}).validate(), DomainError);
  CHECK_THROWS_AS(ModelParams({4, 2, 3, 8}).validate(), DomainError);
  const ReducedGrid g({4, 2, 3, 32});
  CHECK_THROWS_AS(check_profile(ReducedProfile(32), g), DimensionError);
  CHECK(g.size() == 33);
  CHECK(g.spacing() == doctest::Approx(pi / 64));
}
