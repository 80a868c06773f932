#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "wtk/kernels.hpp"

using wtk::Mat;
using wtk::MatD;

namespace {

MatD hilbert(int n) {
  MatD h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = 1.0 / double(i + j + 1);
  return h;
}

}  // namespace

TEST_CASE("lu solve recovers the all-ones solution of a Hilbert system") {
  const MatD h = hilbert(4);
  std::vector<double> b(4, 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) b[i] += h(i, j);
  const std::vector<double> x = wtk::solve(h, b);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(x[i] - 1.0) < 1e-9);
}

TEST_CASE("lu solve rejects an exactly singular matrix") {
  MatD a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  CHECK_THROWS_AS(wtk::solve(a, std::vector<double>{1.0, 1.0}), wtk::Singular);
}

TEST_CASE("inverse times original is the identity") {
  const MatD h = hilbert(4);
  const MatD prod = wtk::matmul(wtk::inverse(h), h);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) < 1e-8);
}

TEST_CASE("eigenvector_for picks out a diagonal eigendirection") {
  MatD a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  a(2, 2) = 3.0;
  const std::vector<double> v = wtk::eigenvector_for(a, 2.0, 1e-10);
  CHECK(std::abs(std::abs(v[1]) - 1.0) < 1e-12);
  CHECK(std::abs(v[0]) < 1e-12);
  CHECK(std::abs(v[2]) < 1e-12);
}

TEST_CASE("eigenvector_for rejects a value far from the spectrum") {
  MatD a(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  a(2, 2) = 3.0;
  CHECK_THROWS_AS(wtk::eigenvector_for(a, 7.5, 1e-10), wtk::NotAnEigenvalue);
}

TEST_CASE("eigenvector_for flags a two-dimensional eigenspace") {
  MatD a(3, 3);
  a(0, 0) = 2.0;
  a(1, 1) = 2.0;
  a(2, 2) = 5.0;
  CHECK_THROWS_AS(wtk::eigenvector_for(a, 2.0, 1e-10),
                  wtk::DegenerateEigenspace);
}

TEST_CASE("eigenvector_for handles a nonsymmetric matrix with known pair") {
  // [[0,1],[2,1]] has eigenvalues 2 and -1; for 2 the eigenvector is (1,2).
  MatD a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  const std::vector<double> v = wtk::eigenvector_for(a, 2.0, 1e-10);
  CHECK(std::abs(v[1] / v[0] - 2.0) < 1e-10);
}

TEST_CASE("poly_roots solves mu^2 - 1") {
  using cd = std::complex<double>;
  const auto r = wtk::poly_roots({cd(-1.0), cd(0.0), cd(1.0)});
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] - cd(-1.0)) < 1e-12);
  CHECK(std::abs(r[1] - cd(1.0)) < 1e-12);
}

TEST_CASE("poly_roots factors the origin cluster of mu^10 - mu^9 exactly") {
  using cd = std::complex<double>;
  std::vector<cd> c(11, cd(0.0));
  c[9] = cd(-1.0);
  c[10] = cd(1.0);
  const auto r = wtk::poly_roots(c);
  REQUIRE(r.size() == 10);
  int zeros = 0;
  for (const auto& z : r)
    if (std::abs(z) == 0.0) ++zeros;
  CHECK(zeros == 9);
  CHECK(std::abs(r.back() - cd(1.0)) < 1e-12);
}

TEST_CASE("poly_roots recovers the Wilkinson-5 roots") {
  using cd = std::complex<double>;
  // (z-1)(z-2)(z-3)(z-4)(z-5) = z^5 - 15 z^4 + 85 z^3 - 225 z^2 + 274 z - 120
  const std::vector<cd> c = {cd(-120.0), cd(274.0), cd(-225.0),
                             cd(85.0),   cd(-15.0), cd(1.0)};
  const auto r = wtk::poly_roots(c);
  REQUIRE(r.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(std::abs(r[k].real() - double(k + 1)) < 1e-8);
    CHECK(std::abs(r[k].imag()) < 1e-8);
  }
}

TEST_CASE("poly_roots handles complex conjugate pairs") {
  using cd = std::complex<double>;
  // z^2 + 1
  const auto r = wtk::poly_roots({cd(1.0), cd(0.0), cd(1.0)});
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r[0] - cd(0.0, -1.0)) < 1e-12);
  CHECK(std::abs(r[1] - cd(0.0, 1.0)) < 1e-12);
}

TEST_CASE("composite quadrature integrates a constant exactly") {
  const std::vector<double> s(9, 2.5);
  CHECK(wtk::composite_quadrature(s, 0.125) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("composite quadrature integrates sin over [0, pi]") {
  const int n = (1 << 12) + 1;
  std::vector<double> s(n);
  const double h = std::numbers::pi / (n - 1);
  for (int i = 0; i < n; ++i) s[i] = std::sin(i * h);
  CHECK(std::abs(wtk::composite_quadrature(s, h) - 2.0) < 1e-10);
}

TEST_CASE("composite quadrature integrates x^3 over [0, 1]") {
  const int n = 17;
  std::vector<double> s(n);
  const double h = 1.0 / (n - 1);
  for (int i = 0; i < n; ++i) s[i] = std::pow(i * h, 3);
  CHECK(std::abs(wtk::composite_quadrature(s, h) - 0.25) < 1e-12);
}

TEST_CASE("composite quadrature rejects even sample counts") {
  const std::vector<double> s(8, 1.0);
  CHECK_THROWS_AS(wtk::composite_quadrature(s, 0.1), wtk::BadSampleCount);
}

TEST_CASE("fit_slope recovers an exact linear trend") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 6; ++i) {
    xs.push_back(double(i));
    ys.push_back(3.0 - 2.5 * i);
  }
  CHECK(wtk::fit_slope(xs, ys) == doctest::Approx(-2.5).epsilon(1e-14));
}

TEST_CASE("checksums are order-sensitive and stable") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  const std::vector<double> b = {3.0, 2.0, 1.0};
  const std::uint64_t seed = 0xcbf29ce484222325ULL;
  CHECK(wtk::checksum(a, seed) != wtk::checksum(b, seed));
  CHECK(wtk::checksum(a, seed) == wtk::checksum(a, seed));
}

TEST_CASE("poly_roots rejects non-finite coefficients") {
  // NaN residuals must count as failures, not silently pass the gate.
  const std::complex<double> nan(std::numeric_limits<double>::quiet_NaN(),
                                 0.0);
  CHECK_THROWS_AS((void)wtk::poly_roots({nan, {1.0, 0.0}, {1.0, 0.0}}),
                  wtk::NoConvergence);
}
