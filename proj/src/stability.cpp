#include "wtk/stability.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>

#include "wtk/errors.hpp"
#include "wtk/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wtk {

namespace {

std::complex<double> horner(const std::vector<double>& ascending,
                            std::complex<double> x) {
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = ascending.size(); i-- > 0;) {
    acc = acc * x + ascending[i];
  }
  return acc;
}

CellClass classify(const CharacteristicPair& pair, std::complex<double> z,
                   double margin) {
  try {
    const StabilityResult r = is_stable(z, pair, margin);
    if (r.stable) return CellClass::kStable;
    return r.marginal ? CellClass::kMarginal : CellClass::kUnstable;
  } catch (const RootfindingFailure&) {
    return CellClass::kFailed;
  }
}

}  // namespace

CharacteristicPair characteristic_pair(const QuadratureWeights& weights) {
  const int k = weights.history_depth();  // alpha2 + 1
  if (k < 1) throw Error("characteristic_pair: empty weight sequence");

  CharacteristicPair pair;
  pair.spec = weights.spec;
  pair.p_coeffs.assign(std::size_t(k) + 1, 0.0);
  pair.p_coeffs[std::size_t(k)] = 1.0;
  pair.p_coeffs[std::size_t(k) - 1] = -1.0;
  pair.q_coeffs.assign(std::size_t(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    pair.q_coeffs[std::size_t(k - j)] = weights.gamma[std::size_t(j)];
  }
  return pair;
}

std::vector<LocusPoint> boundary_locus(const CharacteristicPair& pair,
                                       int n_theta, bool skip_poles) {
  if (n_theta < 16) throw Error("boundary_locus: need at least 16 samples");

  std::vector<LocusPoint> out;
  out.reserve(std::size_t(n_theta) + 1);
  for (int i = 0; i <= n_theta; ++i) {
    LocusPoint pt;
    pt.theta = 2.0 * std::numbers::pi * i / n_theta;
    if (i == 0 || i == n_theta) {
      // mu = 1 is a root of p by construction; pin the closure exactly.
      pt.z = std::complex<double>(0.0, 0.0);
      out.push_back(pt);
      continue;
    }
    const std::complex<double> mu(std::cos(pt.theta), std::sin(pt.theta));
    const std::complex<double> pv = horner(pair.p_coeffs, mu);
    const std::complex<double> qv = horner(pair.q_coeffs, mu);
    if (std::abs(qv) < 1e-14) {
      if (!skip_poles) {
        throw PoleOnCircle("boundary_locus: q vanishes at theta = " +
                           std::to_string(pt.theta));
      }
      pt.pole = true;
      pt.z = std::complex<double>(0.0, 0.0);
    } else {
      pt.z = pv / qv;
    }
    out.push_back(pt);
  }
  return out;
}

StabilityResult is_stable(std::complex<double> z,
                          const CharacteristicPair& pair, double margin) {
  const std::size_t n = pair.p_coeffs.size();
  std::vector<std::complex<double>> c(n);
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = std::complex<double>(pair.p_coeffs[j], 0.0) - z * pair.q_coeffs[j];
    if (!std::isfinite(c[j].real()) || !std::isfinite(c[j].imag())) {
      throw RootfindingFailure(
          "is_stable: non-finite characteristic coefficients");
    }
  }

  StabilityResult res;
  try {
    res.roots = poly_roots(c);
  } catch (const NoConvergence& e) {
    throw RootfindingFailure(e.what());
  }
  for (const auto& mu : res.roots) {
    res.max_modulus = std::max(res.max_modulus, std::abs(mu));
  }
  res.stable = res.max_modulus < 1.0 - margin;
  res.marginal =
      !res.stable && res.max_modulus <= 1.0 + margin;
  return res;
}

RegionGrid region_grid(const CharacteristicPair& pair, double re_lo,
                       double re_hi, double im_lo, double im_hi, int n_re,
                       int n_im, double margin, bool parallel) {
  if (n_re < 8 || n_im < 8) {
    throw Error("region_grid: need at least 8 points per axis");
  }
  if (!(re_lo < re_hi) || !(im_lo < im_hi)) {
    throw Error("region_grid: empty axis range");
  }

  RegionGrid grid;
  grid.n_re = n_re;
  grid.n_im = n_im;
  grid.re.resize(std::size_t(n_re));
  grid.im.resize(std::size_t(n_im));
  for (int i = 0; i < n_re; ++i) {
    grid.re[std::size_t(i)] = re_lo + (re_hi - re_lo) * i / (n_re - 1);
  }
  for (int j = 0; j < n_im; ++j) {
    grid.im[std::size_t(j)] = im_lo + (im_hi - im_lo) * j / (n_im - 1);
  }
  grid.cells.assign(std::size_t(n_re) * std::size_t(n_im),
                    CellClass::kFailed);

  const int total = n_re * n_im;
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (int idx = 0; idx < total; ++idx) {
      const int i = idx % n_re;
      const int j = idx / n_re;
      grid.cells[std::size_t(idx)] = classify(
          pair, {grid.re[std::size_t(i)], grid.im[std::size_t(j)]}, margin);
    }
  } else {
    for (int idx = 0; idx < total; ++idx) {
      const int i = idx % n_re;
      const int j = idx / n_re;
      grid.cells[std::size_t(idx)] = classify(
          pair, {grid.re[std::size_t(i)], grid.im[std::size_t(j)]}, margin);
    }
  }
  return grid;
}

int winding_number(const std::vector<LocusPoint>& locus,
                   std::complex<double> z0) {
  std::vector<double> angles;
  angles.reserve(locus.size());
  const std::size_t n_open =
      locus.size() > 1 && !locus.front().pole && !locus.back().pole &&
              locus.front().z == locus.back().z
          ? locus.size() - 1
          : locus.size();
  for (std::size_t i = 0; i < n_open; ++i) {
    if (locus[i].pole) continue;
    const std::complex<double> w = locus[i].z - z0;
    angles.push_back(std::atan2(w.imag(), w.real()));
  }
  if (angles.size() < 3) return 0;

  double sum = 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    double d = angles[(i + 1) % angles.size()] - angles[i];
    d = std::fmod(d + std::numbers::pi, two_pi);
    if (d < 0.0) d += two_pi;
    d -= std::numbers::pi;
    sum += d;
  }
  return int(std::lround(sum / two_pi));
}

}  // namespace wtk
