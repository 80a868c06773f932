#pragma once

// Stability characterization of the Gamma-weighted step scheme on the scalar
// model problem y' = lambda y: the update has characteristic polynomial
// p(mu) - z q(mu) with z = lambda h, and the method is stable at z when all
// roots lie strictly inside the unit circle.  The boundary locus z(theta) =
// p(e^{i theta}) / q(e^{i theta}) traces the region's edge.

#include <complex>
#include <vector>

#include "wtk/integrator.hpp"

namespace wtk {

struct CharacteristicPair {
  CoifletSpec spec;
  // Ascending coefficients (index = power of mu).
  // p(mu) = mu^K - mu^{K-1}, q(mu) = sum_k Gamma_k mu^{K-k}, K = alpha2+1.
  std::vector<double> p_coeffs;
  std::vector<double> q_coeffs;

  int degree() const { return int(p_coeffs.size()) - 1; }
};

CharacteristicPair characteristic_pair(const QuadratureWeights& weights);

struct LocusPoint {
  double theta = 0.0;
  std::complex<double> z;
  bool pole = false;  // |q(e^{i theta})| below threshold; z not meaningful
};

// Samples theta_i = 2 pi i / n_theta for i = 0..n_theta (closed: the last
// point repeats the first).  Requires n_theta >= 16.  Samples where q nearly
// vanishes are flagged (and skipped by consumers); with skip_poles = false
// such a sample throws PoleOnCircle instead.
std::vector<LocusPoint> boundary_locus(const CharacteristicPair& pair,
                                       int n_theta, bool skip_poles = true);

struct StabilityResult {
  bool stable = false;
  bool marginal = false;
  double max_modulus = 0.0;
  std::vector<std::complex<double>> roots;
};

// Root-condition test for p(mu) - z q(mu): stable when max |mu| < 1 - margin,
// marginal within +-margin of the circle.  Throws RootfindingFailure when the
// root finder cannot certify residuals.
StabilityResult is_stable(std::complex<double> z,
                          const CharacteristicPair& pair,
                          double margin = 1e-9);

enum class CellClass : unsigned char {
  kStable = 0,
  kUnstable = 1,
  kMarginal = 2,
  kFailed = 3,  // root finding failed; recorded, not thrown
};

struct RegionGrid {
  std::vector<double> re;        // n_re axis values
  std::vector<double> im;        // n_im axis values
  std::vector<CellClass> cells;  // row-major: cells[j*n_re + i] at (re_i, im_j)
  int n_re = 0;
  int n_im = 0;
};

// Classifies an n_re x n_im grid over [re_lo, re_hi] x [im_lo, im_hi].
// Requires at least 8 points per axis.  OpenMP-parallel over cells when
// parallel = true; the serial path is kept as a reference.
RegionGrid region_grid(const CharacteristicPair& pair, double re_lo,
                       double re_hi, double im_lo, double im_hi, int n_re,
                       int n_im, double margin = 1e-9, bool parallel = true);

// Winding number of the closed locus polyline around z0 (pole samples and the
// duplicated closing point are ignored).
int winding_number(const std::vector<LocusPoint>& locus,
                   std::complex<double> z0);

}  // namespace wtk
