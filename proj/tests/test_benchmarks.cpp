#include "wtk/benchmarks.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wtk/errors.hpp"
#include "wtk/kernels.hpp"

namespace {

using namespace wtk;

const WaveletMachinery& machinery6() {
  static WaveletMachinery m = build_machinery({6, 7});
  return m;
}

}  // namespace

TEST_CASE("jacobi_cn: identities, degenerate modulus, quarter period") {
  for (double k : {0.0, 0.3, 0.7, 0.95}) CHECK(jacobi_cn(0.0, k) == 1.0);
  for (double u : {0.2, 1.3, 4.0}) {
    CHECK(jacobi_cn(u, 0.0) == std::cos(u));
    CHECK(std::abs(jacobi_cn(u, 1e-9) - std::cos(u)) <= 1e-12);
  }
  // At the quarter period the elliptic cosine crosses zero.
  for (double k : {0.3, 0.7036, 0.95})
    CHECK(std::abs(jacobi_cn(elliptic_k(k), k)) <= 1e-10);
  CHECK(std::abs(elliptic_k(0.0) - std::numbers::pi / 2) <= 1e-15);
  CHECK_THROWS_AS((void)jacobi_cn(1.0, 1.0), ModulusOutOfRange);
  CHECK_THROWS_AS((void)jacobi_cn(1.0, -0.1), ModulusOutOfRange);
  CHECK_THROWS_AS((void)elliptic_k(1.5), ModulusOutOfRange);
}

TEST_CASE("jacobi_cn satisfies its second-order differential equation") {
  // (cn)'' = -(1 - 2k^2) cn - 2k^2 cn^3, probed with a fourth-order
  // five-point second difference.
  const double k = std::sqrt(10.0 / 22.0);
  const double k2 = k * k;
  const double d = 1e-3;
  double worst = 0.0;
  for (double u = 0.1; u < 6.0; u += 0.37) {
    const double c0 = jacobi_cn(u, k);
    const double cdd = (-(jacobi_cn(u + 2 * d, k) + jacobi_cn(u - 2 * d, k)) +
                        16.0 * (jacobi_cn(u + d, k) + jacobi_cn(u - d, k)) -
                        30.0 * c0) /
                       (12.0 * d * d);
    const double rhs = -(1.0 - 2.0 * k2) * c0 - 2.0 * k2 * c0 * c0 * c0;
    worst = std::max(worst, std::abs(cdd - rhs));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("bessel_i: series values match an independent integral") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(3, 0.0) == 0.0);
  CHECK_THROWS_AS((void)bessel_i(-1, 1.0), Error);
  // I_nu(z) = (1/pi) integral_0^pi exp(z cos th) cos(nu th) dth.
  const double pi = std::numbers::pi;
  for (double z : {10.0 / (2.0 * pi), 5.0}) {
    for (int nu : {0, 1, 5}) {
      const int count = (1 << 12) + 1;
      std::vector<double> samples(static_cast<size_t>(count));
      for (int i = 0; i < count; ++i) {
        const double th = pi * i / (count - 1);
        samples[size_t(i)] = std::exp(z * std::cos(th)) * std::cos(nu * th) / pi;
      }
      const double quad = composite_quadrature(samples, pi / (count - 1));
      CHECK(std::abs(bessel_i(nu, z) - quad) <= 1e-12 * std::max(1.0, quad));
    }
  }
  CHECK_THROWS_AS((void)bessel_i(0, 40000.0), SeriesNotConverged);
}

TEST_CASE("burgers_reference case a: initial condition and PDE residual") {
  const double pi = std::numbers::pi;
  const double re = 200.0;
  // Initial profile: 2 pi sin(pi x) / (100 Re + Re cos(pi x)).
  for (double x = 0.0; x <= 1.0; x += 1.0 / 16) {
    const double stated =
        2.0 * pi * std::sin(pi * x) / (100.0 * re + re * std::cos(pi * x));
    CHECK(std::abs(burgers_reference('a', re, x, 0.0) - stated) <= 1e-17);
  }
  // Residual of u_t + u u_x - u_xx / re on a 65 x 17 probe grid, with
  // fourth-order central differences.
  const double dx = 1e-3, dt = 1e-3;
  auto u = [re](double x, double t) { return burgers_reference('a', re, x, t); };
  double worst = 0.0;
  for (int ix = 0; ix <= 64; ++ix)
    for (int it = 1; it <= 17; ++it) {
      const double x = ix / 64.0, t = it / 17.0;
      const double ut = (8 * (u(x, t + dt) - u(x, t - dt)) -
                         (u(x, t + 2 * dt) - u(x, t - 2 * dt))) /
                        (12 * dt);
      const double ux = (8 * (u(x + dx, t) - u(x - dx, t)) -
                         (u(x + 2 * dx, t) - u(x - 2 * dx, t))) /
                        (12 * dx);
      const double uxx = (-(u(x + 2 * dx, t) + u(x - 2 * dx, t)) +
                          16 * (u(x + dx, t) + u(x - dx, t)) - 30 * u(x, t)) /
                         (12 * dx * dx);
      worst = std::max(worst, std::abs(ut + u(x, t) * ux - uxx / re));
    }
  CHECK(worst <= 1e-10);
}

TEST_CASE("burgers_reference case b: series limits and PDE residual") {
  const double pi = std::numbers::pi;
  const double re = 10.0;
  for (double x = 0.0; x <= 1.0; x += 1.0 / 16)
    CHECK(std::abs(burgers_reference('b', re, x, 0.0) - std::sin(pi * x)) <=
          1e-12);
  CHECK(burgers_reference('b', re, 0.0, 0.4) == 0.0);
  CHECK(std::abs(burgers_reference('b', re, 1.0, 0.4)) <= 1e-14);
  const double dx = 1e-3, dt = 1e-3;
  auto u = [re](double x, double t) { return burgers_reference('b', re, x, t); };
  double worst = 0.0;
  for (int ix = 1; ix < 32; ++ix)
    for (int it = 1; it <= 8; ++it) {
      const double x = ix / 32.0, t = it / 8.0;
      const double ut = (8 * (u(x, t + dt) - u(x, t - dt)) -
                         (u(x, t + 2 * dt) - u(x, t - 2 * dt))) /
                        (12 * dt);
      const double ux = (8 * (u(x + dx, t) - u(x - dx, t)) -
                         (u(x + 2 * dx, t) - u(x - 2 * dx, t))) /
                        (12 * dx);
      const double uxx = (-(u(x + 2 * dx, t) + u(x - 2 * dx, t)) +
                          16 * (u(x + dx, t) + u(x - dx, t)) - 30 * u(x, t)) /
                         (12 * dx * dx);
      worst = std::max(worst, std::abs(ut + u(x, t) * ux - uxx / re));
    }
  CHECK(worst <= 1e-8);
  CHECK_THROWS_AS((void)burgers_reference('c', re, 0.5, 0.5), Error);
  CHECK_THROWS_AS((void)burgers_reference('b', re, 0.5, -0.1), Error);
  CHECK_THROWS_AS((void)burgers_reference('b', -1.0, 0.5, 0.5), Error);
  CHECK_THROWS_AS((void)burgers_reference('b', 1e6, 0.5, 0.5),
                  SeriesNotConverged);
}

TEST_CASE("make_problem: defaults, overrides, and validation") {
  const double pi = std::numbers::pi;
  Benchmark osc = make_problem("oscillator");
  CHECK(osc.parameters.at("xi") == doctest::Approx(4 * pi * pi));
  CHECK(osc.h == 0.125);
  CHECK(osc.t_end == 4.0);
  CHECK(osc.spec.N == 6);
  CHECK(osc.spec.M1 == 7);
  CHECK_FALSE(osc.is_pde);
  CHECK(osc.ode.dimension == 2);
  CHECK(osc.y0 == Vec{1.0, 0.0});
  CHECK(std::abs(osc.reference(0.0, 0.5) + 1.0) <= 1e-12);  // cos(pi) = -1

  Benchmark ba = make_problem("burgers_a");
  CHECK(ba.parameters.at("re") == 200.0);
  CHECK(ba.n == 4);
  CHECK(ba.h == 1.0 / 64);
  CHECK(ba.is_pde);
  CHECK(ba.pde.fields == 1);
  // Midpoint of the initial profile: 2 pi / (100 Re).
  CHECK(std::abs(ba.pde.initial[0](0.5) - 2.0 * pi / 20000.0) <=
        1e-15 * 2.0 * pi / 20000.0);

  Benchmark kg = make_problem("klein_gordon");
  CHECK(kg.n == 4);
  CHECK(kg.h == 1.0 / 16);
  CHECK(kg.t_end == 5.0);
  CHECK(kg.pde.fields == 2);
  CHECK(kg.reference(0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

  Benchmark d4 = make_problem("duffing", {{"N", 4.0}, {"eta", 100.0}});
  CHECK(d4.spec.N == 4);
  CHECK(d4.parameters.at("eta") == 100.0);

  CHECK_THROWS_AS((void)make_problem("lorenz"), UnknownBenchmark);
  CHECK_THROWS_AS((void)make_problem("oscillator", {{"re", 10.0}}), Error);
  CHECK_THROWS_AS((void)make_problem("burgers_a", {{"re", -5.0}}), Error);
  CHECK_THROWS_AS((void)make_problem("duffing", {{"eta", -1.0}}), Error);
  CHECK_THROWS_AS((void)make_problem("burgers_a", {{"n", 4.5}}), Error);
}

TEST_CASE("duffing seeds: the derivative recursion matches hand expansion") {
  Benchmark b = make_problem("duffing");  // eta = 10, omega_n = 1
  REQUIRE(static_cast<bool>(b.ode.seed_provider));
  const std::vector<Vec> seeds = b.ode.seed_provider(6);
  REQUIRE(seeds.size() == 6);
  // x'' = -x - 10 x^3: x(0)=1, x'=0, x''=-11, x'''=0, x''''=11*31=341,
  // x^(5)=0, x^(6) = -341 - 10*(3*341 + 18*121) = -32351.
  CHECK(seeds[0] == Vec{1.0, 0.0});
  CHECK(seeds[1] == Vec{0.0, -11.0});
  CHECK(seeds[2] == Vec{-11.0, 0.0});
  CHECK(seeds[3] == Vec{0.0, 341.0});
  CHECK(seeds[4] == Vec{341.0, 0.0});
  CHECK(seeds[5] == Vec{0.0, -32351.0});

  Benchmark osc = make_problem("oscillator");
  const double xi = osc.parameters.at("xi");
  const std::vector<Vec> os = osc.ode.seed_provider(5);
  CHECK(os[2] == Vec{-xi, 0.0});
  CHECK(os[4] == Vec{xi * xi, 0.0});
}

TEST_CASE("duffing march tracks the elliptic-cosine reference") {
  Benchmark b = make_problem("duffing");
  const RunResult r = run_benchmark(b, machinery6(), 1.0 / 64, 1.0);
  CHECK(r.has_error);
  CHECK(r.max_error <= 5e-8);  // measured 1.46e-08
  // N = 4 bank: fitted order near 4 over a step-size sweep.
  Benchmark d4 = make_problem("duffing", {{"N", 4.0}});
  const ErrorStudy s = convergence_study(
      d4, {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}, 1.0);
  CHECK(s.fitted_points == 4);
  CHECK(s.slope >= 3.3);
  CHECK(s.slope <= 4.7);
}

TEST_CASE("oscillator study: order preserved under fallback seeds") {
  Benchmark b = make_problem("oscillator");
  const std::vector<double> hs{1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64,
                               1.0 / 128};
  const ErrorStudy exact = convergence_study(b, hs, 4.0);
  Benchmark fb = b;
  fb.ode.seed_provider = nullptr;
  const ErrorStudy fallback = convergence_study(fb, hs, 4.0);
  for (size_t i = 0; i < hs.size(); ++i) {
    CHECK(std::isfinite(exact.errors[i]));
    CHECK(exact.diagnostics[i].empty());
  }
  CHECK(exact.slope >= 5.5);        // measured 6.85
  CHECK(exact.slope <= 7.5);
  CHECK(fallback.slope >= 5.5);     // measured 6.79
  CHECK(std::abs(exact.slope - fallback.slope) <= 1.0);
  // The sweep is deterministic: parallel and serial agree bitwise.
  const ErrorStudy serial = convergence_study(b, hs, 4.0, false);
  CHECK(std::memcmp(serial.errors.data(), exact.errors.data(),
                    serial.errors.size() * sizeof(double)) == 0);
}

TEST_CASE("convergence_study: failures recorded per point, study continues") {
  Benchmark b = make_problem("oscillator");
  // 0.3 is not a divisor of the probe time; that run fails, the rest carry on.
  const ErrorStudy s = convergence_study(b, {1.0 / 8, 0.3, 1.0 / 32}, 4.0);
  CHECK(std::isfinite(s.errors[0]));
  CHECK(std::isnan(s.errors[1]));
  CHECK_FALSE(s.diagnostics[1].empty());
  CHECK(std::isfinite(s.errors[2]));
  CHECK(s.fitted_points == 2);
  CHECK(std::isfinite(s.slope));

  CHECK_THROWS_AS((void)convergence_study(b, {0.1, 0.2}, 4.0), Error);
  Benchmark shock = make_problem("burgers_shock");
  CHECK_THROWS_AS((void)convergence_study(shock, {0.1, 0.2, 0.4}, 1.0), Error);
}

TEST_CASE("burgers case b: full pipeline matches the series reference") {
  Benchmark b = make_problem("burgers_b");
  const RunResult r = run_benchmark(b, machinery6(), b.h, 1.0);
  CHECK(r.has_error);
  CHECK(r.max_error <= 1e-4);  // measured 3.26e-05
  CHECK(r.checksum_before == r.checksum_after);
  CHECK(r.nodes.size() == 17);
  CHECK(r.trajectory.states.size() == 257);
}

TEST_CASE("klein-gordon: early-window accuracy and decoupling checksums") {
  Benchmark b = make_problem("klein_gordon");
  const RunResult r = run_benchmark(b, machinery6(), b.h, 0.5);
  CHECK(r.has_error);
  CHECK(r.max_error <= 1e-10);  // measured 2.44e-12
  CHECK(r.checksum_before == r.checksum_after);
  CHECK(r.final_field.size() == 17);  // displacement field at the nodes
  // final_field already includes the boundary lifting.
  double recomputed = 0.0;
  for (size_t k = 0; k < r.nodes.size(); ++k)
    recomputed = std::max(recomputed, std::abs(r.final_field[k] -
                                               b.reference(r.nodes[k], 0.5)));
  CHECK(recomputed == r.max_error);
}

TEST_CASE("shock run: bounded, steepening, no reference attached") {
  Benchmark b = make_problem("burgers_shock");
  CHECK_FALSE(static_cast<bool>(b.reference));
  WaveletMachinery m = build_machinery(b.spec);
  const RunResult r = run_benchmark(b, m, b.h, 16.0 / 256.0);
  CHECK_FALSE(r.has_error);
  double umax = 0.0;
  for (const Vec& y : r.trajectory.states)
    for (double v : y) umax = std::max(umax, std::abs(v));
  CHECK(umax <= 1.0 + 1e-3);
  // Gradient at the midpoint steepens monotonically while the front forms.
  const int mid = static_cast<int>(r.nodes.size()) / 2;
  const double dxn = r.nodes[1] - r.nodes[0];
  double previous = 0.0;
  for (size_t s = 0; s < r.trajectory.states.size(); s += 4) {
    const Vec& y = r.trajectory.states[s];
    const double grad =
        (y[size_t(mid + 1)] - y[size_t(mid - 1)]) / (2.0 * dxn);
    CHECK(grad < previous);
    previous = grad;
  }
}

TEST_CASE("run_benchmark rejects misaligned probe times") {
  Benchmark b = make_problem("oscillator");
  CHECK_THROWS_AS((void)run_benchmark(b, machinery6(), 0.125, 0.3), Error);
  CHECK_THROWS_AS((void)run_benchmark(b, machinery6(), -0.1, 1.0), Error);
  CHECK_THROWS_AS((void)run_benchmark(b, machinery6(), 0.125, -1.0), Error);
}
