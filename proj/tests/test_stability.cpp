#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>

#include "wtk/coiflet.hpp"
#include "wtk/errors.hpp"
#include "wtk/integrator.hpp"
#include "wtk/interval.hpp"
#include "wtk/stability.hpp"

namespace {

struct StabFixture {
  wtk::QuadratureWeights weights;
  wtk::CharacteristicPair pair;

  explicit StabFixture(int n, int m1) {
    const auto bank = wtk::solve_filter_coefficients(wtk::CoifletSpec{n, m1});
    const auto tables = wtk::build_scaling_tables(bank);
    const auto ops = wtk::build_boundary_operators(tables);
    weights = wtk::gamma_weights(tables, ops);
    pair = wtk::characteristic_pair(weights);
  }
};

const StabFixture& fix6() {
  static StabFixture f(6, 7);
  return f;
}

std::complex<double> eval_ascending(const std::vector<double>& c,
                                    std::complex<double> x) {
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

}  // namespace

TEST_CASE("characteristic pair structure") {
  const auto& f = fix6();
  const int k = f.weights.history_depth();
  CHECK(k == 10);
  CHECK(f.pair.degree() == k);
  CHECK(f.pair.p_coeffs[std::size_t(k)] == 1.0);
  CHECK(f.pair.p_coeffs[std::size_t(k) - 1] == -1.0);

  // p(1) = 0 exactly.
  double sum = 0.0;
  for (double c : f.pair.p_coeffs) sum += c;
  CHECK(sum == 0.0);

  // q's leading coefficient is Gamma_0 and q(mu) = sum Gamma_k mu^{K-k}.
  CHECK(f.pair.q_coeffs[std::size_t(k)] == f.weights.gamma[0]);
  for (int j = 0; j <= k; ++j) {
    CHECK(f.pair.q_coeffs[std::size_t(k - j)] ==
          f.weights.gamma[std::size_t(j)]);
  }
}

TEST_CASE("boundary locus: closure, origin, and conjugate symmetry") {
  const auto& f = fix6();
  CHECK_THROWS_AS((void)wtk::boundary_locus(f.pair, 15), wtk::Error);

  const auto loc = wtk::boundary_locus(f.pair, 512);
  REQUIRE(int(loc.size()) == 513);
  CHECK(loc.front().z == loc.back().z);
  CHECK(loc.front().z.real() == 0.0);
  CHECK(loc.front().z.imag() == 0.0);
  for (const auto& p : loc) CHECK_FALSE(p.pole);

  // theta = pi sample equals p(-1)/q(-1) assembled from the weights.
  const auto& g = f.weights.gamma;
  const int k = f.weights.history_depth();
  std::complex<double> pm = (k % 2 == 0 ? 1.0 : -1.0);  // (-1)^K - (-1)^(K-1)
  pm *= 2.0;
  std::complex<double> qm(0.0, 0.0);
  for (int j = 0; j <= k; ++j) {
    qm += g[std::size_t(j)] * ((k - j) % 2 == 0 ? 1.0 : -1.0);
  }
  CHECK(std::abs(loc[256].z - pm / qm) <= 1e-12);

  for (int i = 1; i < 512; ++i) {
    CHECK(std::abs(loc[std::size_t(512 - i)].z - std::conj(loc[std::size_t(i)].z)) <=
          1e-12);
  }
}

TEST_CASE("boundary locus self-consistency: e^{i theta} is a root") {
  const auto& f = fix6();
  const auto loc = wtk::boundary_locus(f.pair, 64);
  for (int i = 1; i < 64; i += 3) {
    const auto& pt = loc[std::size_t(i)];
    const std::complex<double> mu_expect(std::cos(pt.theta),
                                         std::sin(pt.theta));
    const auto res = wtk::is_stable(pt.z, f.pair);
    double dmin = 1e30;
    for (const auto& mu : res.roots) {
      dmin = std::min(dmin, std::abs(mu - mu_expect));
    }
    CHECK(dmin <= 1e-8);
  }
}

TEST_CASE("root-condition classification at reference points") {
  const auto& f = fix6();

  const auto at0 = wtk::is_stable({0.0, 0.0}, f.pair);
  CHECK_FALSE(at0.stable);
  CHECK(at0.marginal);  // mu = 1 sits on the circle
  CHECK(std::abs(at0.max_modulus - 1.0) <= 1e-12);
  CHECK(int(at0.roots.size()) == f.pair.degree());

  const auto neg = wtk::is_stable({-0.1, 0.0}, f.pair);
  CHECK(neg.stable);
  CHECK(neg.max_modulus < 1.0);

  const auto pos = wtk::is_stable({1.0, 0.0}, f.pair);
  CHECK_FALSE(pos.stable);
  CHECK_FALSE(pos.marginal);
  CHECK(pos.max_modulus > 1.0);

  // Residual of each returned root in the characteristic polynomial.
  for (const auto& mu : neg.roots) {
    const auto val = eval_ascending(f.pair.p_coeffs, mu) -
                     std::complex<double>(-0.1, 0.0) *
                         eval_ascending(f.pair.q_coeffs, mu);
    CHECK(std::abs(val) <= 1e-9);
  }
}

TEST_CASE("non-finite shift reports a root-finding failure") {
  const auto& f = fix6();
  const std::complex<double> huge(std::numeric_limits<double>::infinity(),
                                  0.0);
  CHECK_THROWS_AS((void)wtk::is_stable(huge, f.pair), wtk::RootfindingFailure);
}

TEST_CASE("locus extent of the N = 6 bank") {
  const auto& f = fix6();
  const auto loc = wtk::boundary_locus(f.pair, 4096);
  double remin = 1e30, remax = -1e30, immax = 0.0;
  for (const auto& p : loc) {
    remin = std::min(remin, p.z.real());
    remax = std::max(remax, p.z.real());
    immax = std::max(immax, std::abs(p.z.imag()));
  }
  // Measured: Re in [-1.1100, 0.0927], |Im| up to 1.4125.
  CHECK(remin > -1.2);
  CHECK(remin < -1.0);
  CHECK(remax < 0.15);
  CHECK(immax > 1.3);
  CHECK(immax < 1.5);
}

TEST_CASE("negative real segment adjacent to the origin is stable") {
  const auto& f = fix6();
  for (int i = 0; i < 50; ++i) {
    const double x = 0.01 + (0.5 - 0.01) * i / 49.0;
    CHECK(wtk::is_stable({-x, 0.0}, f.pair).stable);
  }
}

TEST_CASE("winding classification agrees with the root condition") {
  const auto& f = fix6();
  const auto loc = wtk::boundary_locus(f.pair, 2048);

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(-1.6, 0.6), uy(-1.9, 1.9);
  int agree = 0, total = 0;
  for (int t = 0; t < 600; ++t) {
    const std::complex<double> z0(ux(rng), uy(rng));
    double dmin = 1e30;
    for (const auto& p : loc) dmin = std::min(dmin, std::abs(p.z - z0));
    if (dmin < 5e-3) continue;  // skip points hugging the boundary
    const bool wind_in = wtk::winding_number(loc, z0) != 0;
    const bool root_in = wtk::is_stable(z0, f.pair).stable;
    ++total;
    agree += int(wind_in == root_in);
  }
  REQUIRE(total > 500);
  CHECK(double(agree) / double(total) >= 0.99);
}

TEST_CASE("region grid: marginal origin, unstable right half, symmetry") {
  const auto& f = fix6();
  CHECK_THROWS_AS(
      (void)wtk::region_grid(f.pair, -1.0, 1.0, -1.0, 1.0, 7, 16),
      wtk::Error);

  const auto grid = wtk::region_grid(f.pair, -1.0, 1.0, -1.0, 1.0, 9, 9);
  REQUIRE(grid.n_re == 9);
  REQUIRE(grid.n_im == 9);
  REQUIRE(grid.cells.size() == 81);

  // Node (re=0, im=0) sits at indices (4, 4).
  CHECK(grid.re[4] == 0.0);
  CHECK(grid.im[4] == 0.0);
  CHECK(grid.cells[4 * 9 + 4] == wtk::CellClass::kMarginal);

  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) {
      if (grid.re[std::size_t(i)] > 0.5) {
        CHECK(grid.cells[std::size_t(j * 9 + i)] == wtk::CellClass::kUnstable);
      }
      // Conjugate symmetry of the classification about the real axis.
      CHECK(grid.cells[std::size_t(j * 9 + i)] ==
            grid.cells[std::size_t((8 - j) * 9 + i)]);
    }
  }
}

TEST_CASE("parallel and serial grid classification are identical") {
  const auto& f = fix6();
  const auto a =
      wtk::region_grid(f.pair, -1.3, 0.3, -1.5, 1.5, 17, 17, 1e-9, true);
  const auto b =
      wtk::region_grid(f.pair, -1.3, 0.3, -1.5, 1.5, 17, 17, 1e-9, false);
  REQUIRE(a.cells.size() == b.cells.size());
  CHECK(std::memcmp(a.cells.data(), b.cells.data(), a.cells.size()) == 0);
}

TEST_CASE("N = 4 bank: locus and agreement") {
  StabFixture f(4, 7);
  CHECK(f.pair.degree() == 4);  // alpha2 + 1

  const auto loc = wtk::boundary_locus(f.pair, 2048);
  double remin = 1e30;
  for (const auto& p : loc) remin = std::min(remin, p.z.real());
  // Measured: Re extent down to -3.0057.
  CHECK(remin > -3.2);
  CHECK(remin < -2.8);

  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> ux(-3.5, 0.5), uy(-2.4, 2.4);
  int agree = 0, total = 0;
  for (int t = 0; t < 400; ++t) {
    const std::complex<double> z0(ux(rng), uy(rng));
    double dmin = 1e30;
    for (const auto& p : loc) dmin = std::min(dmin, std::abs(p.z - z0));
    if (dmin < 5e-3) continue;
    ++total;
    agree += int((wtk::winding_number(loc, z0) != 0) ==
                 wtk::is_stable(z0, f.pair).stable);
  }
  REQUIRE(total > 300);
  CHECK(double(agree) / double(total) >= 0.99);
}
