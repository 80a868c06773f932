#pragma once

// Coiflet scaling-function machinery: filter coefficient solving, exact tables
// of the scaling function phi and its derivatives at integers, the cumulative
// integral, dyadic refinement, and moments.  The support of phi is [0, 3N-1];
// phi has N vanishing-moment-style constraints and first moment M1, which is
// what makes single-point collocation of smooth functions high-order accurate.

#include <string>
#include <vector>

#include "wtk/errors.hpp"

namespace wtk {

struct CoifletSpec {
  int N = 6;   // approximation order, positive even
  int M1 = 7;  // first moment of the scaling function

  int support_end() const { return 3 * N - 1; }
  int filter_length() const { return 3 * N; }

  // Throws UnsupportedSpec when N is not a positive even integer or M1 does
  // not lie strictly inside the support.
  void validate() const;
};

struct FilterBank {
  CoifletSpec spec;
  std::vector<long double> p;  // low-pass coefficients p_0 .. p_{3N-1}
  double residual_norm = 0.0;  // max |scaled constraint residual|

  std::vector<double> p_double() const {
    return std::vector<double>(p.begin(), p.end());
  }
};

// Solve the filter constraint system (sum rule, shift orthogonality,
// alternating moments, odd moments) by damped Gauss-Newton in extended
// precision.  Built-in initial guesses cover (N=4, M1=7) and (N=6, M1=7);
// other pairs require an explicit initial guess of length 3N.
// Throws UnsupportedSpec when no guess is available, NoConvergence when the
// iteration stalls above the 1e-12 residual gate.
FilterBank solve_filter_coefficients(
    const CoifletSpec& spec,
    const std::vector<long double>* initial_guess = nullptr);

// phi^(d)(k) for k = 0..3N-1 (endpoints zero): eigenvector of the refinement
// matrix T[i][j] = p_{2i-j} for eigenvalue 2^-d, normalized so that
// sum_j (M1-j)^d phi^(d)(j) = d!.
// Throws NotAnEigenvalue / DegenerateEigenspace for invalid derivative orders.
std::vector<double> integer_values(const FilterBank& bank, int d);

// Cumulative integral phi_int(k) = int_0^k phi for k = 0..3N-1, from the
// refinement relation of the integral with closure 0 below / 1 above support.
std::vector<double> integral_integer_values(const FilterBank& bank);

// Moments M_0..M_n_max of phi, via the recursion obtained by integrating the
// two-scale relation against x^n.
std::vector<double> moments(const FilterBank& bank, int n_max);

// One dyadic refinement step for derivative order d: values on the level-j
// grid of [0, 3N-1] (spacing 2^-j, length (3N-1)*2^j + 1) to level j+1 via
// phi^(d)(x) = 2^d sum_k p_k phi^(d)(2x - k).
std::vector<double> dyadic_refine(const std::vector<double>& values, int d,
                                  const FilterBank& bank);

// Integer values cascaded to dyadic level `levels` entirely in extended
// precision (equivalent to `levels` dyadic_refine steps, rounded once).
std::vector<double> cascade_table(const FilterBank& bank, int d, int levels);

struct ScalingTables {
  CoifletSpec spec;
  int max_derivative = 0;
  std::vector<std::vector<double>> integer_values;  // [d][k], k = 0..3N-1
  int dyadic_level = 0;
  std::vector<std::vector<double>> dyadic_values;  // [d][i], i = x * 2^J
  std::vector<double> integral_values;             // phi_int(0..3N-1)
  std::vector<double> moments;                     // M_0..M_N

  int alpha1() const { return spec.M1 - 1; }
  int alpha2() const { return 3 * spec.N - 2 - spec.M1; }

  // phi^(d) at an integer argument, zero outside the support.
  double phi(int d, int k) const {
    if (k < 0 || k > spec.support_end()) return 0.0;
    return integer_values[d][k];
  }
  // Cumulative integral at an integer argument, clamped to 0 / 1 outside.
  double phi_integral(int k) const {
    if (k <= 0) return 0.0;
    if (k >= spec.support_end()) return 1.0;
    return integral_values[k];
  }
};

// Build all tables.  d_max < 0 selects the default N-1 (for N=6 that is 5,
// the full derivative range the interval operators consume); dyadic_level 0
// stores just the integer grid.
ScalingTables build_scaling_tables(const FilterBank& bank, int d_max = -1,
                                   int dyadic_level = 0);

// JSON cache format:
// {"N", "M1", "p", "integer_values": {"0": [...]}, "integral_values",
//  "moments"}.
std::string tables_to_json(const FilterBank& bank, const ScalingTables& tables);
void tables_from_json(const std::string& text, FilterBank& bank,
                      ScalingTables& tables);

}  // namespace wtk
