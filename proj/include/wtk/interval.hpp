#pragma once

// Interval-bounded approximation: boundary derivative-reconstruction operators
// (zeta_a at the left endpoint, zeta_b at the right), masked Taylor extension
// of nodal data past the endpoints, and the modified basis that evaluates
// sum_k f_k Phi_{m,k}(x) on dyadic grids with order-N accuracy.

#include <functional>
#include <vector>

#include "wtk/coiflet.hpp"
#include "wtk/kernels.hpp"

namespace wtk {

struct BoundaryOperators {
  CoifletSpec spec;
  int alpha1 = 0;  // M1 - 1 exterior translates on the right
  int alpha2 = 0;  // 3N - 2 - M1 exterior translates on the left
  MatD zeta_a;     // N x (alpha1+1): rows i = derivative order at a
  MatD zeta_b;     // N x (alpha2+1): rows i = derivative order at b
};

// zeta_b = (I - B1)^-1 A1 and zeta_a = (I - B0)^-1 A0, assembled from the
// integer tables of phi and its derivatives up to order N-1.
// Throws Singular when I - B is not invertible (inconsistent tables).
BoundaryOperators build_boundary_operators(const ScalingTables& tables);

// Per-side boundary-condition flags; entry i gates the order-i Taylor term of
// the boundary extension.
struct BetaMask {
  std::vector<double> beta_L, beta_R;

  static BetaMask all_ones(int n) {
    return {std::vector<double>(n, 1.0), std::vector<double>(n, 1.0)};
  }
  // Homogeneous-Dirichlet mask: constant term dropped on both sides.
  static BetaMask dirichlet(int n) {
    BetaMask m = all_ones(n);
    m.beta_L[0] = 0.0;
    m.beta_R[0] = 0.0;
    return m;
  }
  // Throws Error unless both vectors have length n with entries exactly 0/1.
  void validate(int n) const;
};

enum class Side { kLeft, kRight };

// Extension weight T_{L,j}(x) or T_{R,j}(x): the coefficient multiplying the
// nodal value f_j (j counted from the matching endpoint) in the masked Taylor
// extension of f evaluated at x.
double extension_weight(const BoundaryOperators& ops, const BetaMask& mask,
                        int m, double a, double b, Side side, int j, double x);

// Level-m modified basis on [a, b] (2^m a, 2^m b must be integers).
// Nodes are x_k = k / 2^m for k = ka..kb; the extension stencils need
// kb - ka + 1 >= alpha1 + alpha2 + 2 nodes or the constructor throws
// ResolutionTooLow.
class IntervalBasis {
 public:
  IntervalBasis(const FilterBank& bank, const ScalingTables& tables,
                const BoundaryOperators& ops, int m, double a, double b,
                BetaMask mask);

  int m() const { return m_; }
  double a() const { return a_; }
  double b() const { return b_; }
  int ka() const { return ka_; }
  int kb() const { return kb_; }
  int node_count() const { return kb_ - ka_ + 1; }
  double node(int k) const { return double(ka_ + k) / double(1 << m_); }
  const BoundaryOperators& ops() const { return ops_; }

  // Nodal values (length node_count) -> extended coefficient vector over
  // translates j = ka-alpha2 .. kb+alpha1.
  std::vector<double> extend(const std::vector<double>& samples) const;

  // Evaluate sum_j F_j phi^(deriv)(2^m x + M1 - j) (F extended) at every
  // dyadic point of [a, b] at level J >= m; the chain rule factor 2^(m*deriv)
  // is included.  Throws ResolutionTooLow when J < m.
  std::vector<double> eval_grid(const std::vector<double>& extended, int J,
                                int deriv = 0) const;

  // approximate(): nodal samples straight to grid values.
  std::vector<double> approximate_grid(const std::vector<double>& samples,
                                       int J, int deriv = 0) const;

  // Single modified basis function Phi_{m,k} at a dyadic point x.  Throws
  // ResolutionTooLow when x is not dyadic within level 24.
  double basis_eval(int k, double x) const;

  // Evaluator form of approximate() at one dyadic point.
  double approximate_at(const std::vector<double>& samples, double x) const;

 private:
  FilterBank bank_;
  ScalingTables tables_;
  BoundaryOperators ops_;
  BetaMask mask_;
  int m_ = 0, ka_ = 0, kb_ = 0;
  double a_ = 0.0, b_ = 1.0;
};

struct ErrorStudyRow {
  int m = 0;
  double max_error = 0.0;
  bool feasible = true;  // false: too few nodes at this level, skipped
};

struct ErrorStudyResult {
  std::vector<ErrorStudyRow> rows;
  double slope = 0.0;  // least-squares slope of log2(max_error) vs m
  bool exact = false;  // all feasible errors at rounding level; slope NaN
};

// Max-error decay study of the interval approximation of f against `exact`
// over the levels in m_list (infeasible levels are recorded and skipped);
// probe grid is level m + probe_refine.
ErrorStudyResult error_study(const FilterBank& bank,
                             const std::function<double(double)>& f,
                             const std::function<double(double)>& exact,
                             const std::vector<int>& m_list, double a = 0.0,
                             double b = 1.0, int probe_refine = 4);

}  // namespace wtk
