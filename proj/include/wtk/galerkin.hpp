#pragma once

// Galerkin semi-discretization of 1-D initial-boundary value problems on
// [0, 1] in the modified interval basis.  Translate Gram matrices are
// computed by composite Simpson quadrature on a refined dyadic grid (the
// second-derivative block by parts, with exact boundary terms from the
// integer tables); block operators are assembled over a declared list of
// linear terms plus one pointwise nonlinear channel; inhomogeneous Dirichlet
// data is removed by a linear-in-x lifting; the result is an OdeSystem whose
// matrices never change during time stepping.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "wtk/integrator.hpp"
#include "wtk/interval.hpp"

namespace wtk {

// One right-hand-side contribution coeff * d^order/dx^order u_source in the
// evolution equation of u_target.
struct LinearTerm {
  int target = 0;
  int source = 0;
  int order = 0;  // 0, 1 or 2
  double coeff = 0.0;
};

// Inhomogeneous Dirichlet data for one field.  The time derivatives are
// required because the lifting folds d(ell)/dt into the transformed forcing.
struct DirichletData {
  std::function<double(double)> g0, g1;        // values at x = 0 / x = 1
  std::function<double(double)> g0_dt, g1_dt;  // time derivatives
  bool empty() const { return !g0 && !g1; }
};

struct PdeProblem {
  int fields = 1;
  std::vector<LinearTerm> linear_terms;

  // Pointwise nonlinear channel: the target equation gains
  // nl_coeff * d^nl_order/dx^nl_order N(u, x, t), N evaluated nodally from
  // the values of all fields at the node.  Empty nl_map disables it.
  int nl_target = 0;
  int nl_order = 0;
  double nl_coeff = 0.0;
  std::function<double(const std::vector<double>&, double, double)> nl_map;
  // dN/du_field; enables the analytic Jacobian of the semi-discrete system.
  std::function<double(const std::vector<double>&, double, double, int)>
      nl_dmap;

  // Per-field forcing f(x, t) and initial data g(x); empty entries mean zero.
  std::vector<std::function<double(double, double)>> forcing;
  std::vector<std::function<double(double)>> initial;

  // Homogeneous boundary constraints: derivative orders clamped to zero at
  // each endpoint, one list per field ({0} = Dirichlet, {1} = Neumann, ...).
  std::vector<std::vector<int>> bc_left, bc_right;

  // Optional inhomogeneous Dirichlet data (empty, or one entry per field).
  std::vector<DirichletData> dirichlet;

  bool has_nonlinearity() const { return static_cast<bool>(nl_map); }
  // Throws Error on inconsistent sizes, out-of-range field indices or
  // derivative orders, or Dirichlet data without time derivatives.
  void validate(const CoifletSpec& spec) const;
};

// Problem transformed to homogeneous boundary data by v = u - ell with
// ell(x, t) = (1 - x) g0(t) + x g1(t) per field.  Linear terms applied to
// ell and d(ell)/dt are folded into the forcing; the nonlinearity is
// evaluated at v + ell; reconstruction adds ell back.
struct LiftedProblem {
  PdeProblem problem;  // homogeneous form
  bool active = false;
  std::function<double(int, double, double)> lift;  // ell(field, x, t)
};

// Identity when no Dirichlet data is present.  Throws UnsupportedBc when a
// field carries Dirichlet data but its boundary constraint is not order 0.
LiftedProblem lift_boundary(const PdeProblem& problem);

// Per-side beta mask with zeros at the listed derivative orders.
BetaMask mask_for_orders(int n_coif, const std::vector<int>& left,
                         const std::vector<int>& right);

struct GalerkinBases {
  CoifletSpec spec;
  int n = 0;
  std::vector<BetaMask> constrained;  // one per field
  BetaMask free_mask;                 // all ones
  FilterBank bank;
  ScalingTables tables;
  BoundaryOperators ops;

  int node_count() const { return (1 << n) + 1; }
};

// Masked basis descriptors at level n for each field plus the all-ones free
// basis.  Throws ResolutionTooLow when 2^n + 1 nodes cannot carry the
// boundary extension stencils (2^n + 1 >= alpha1 + alpha2 + 2).
GalerkinBases build_bases(const FilterBank& bank, const ScalingTables& tables,
                          const BoundaryOperators& ops, int n,
                          const PdeProblem& problem);

// Extension matrix S: nodal values (2^n + 1) -> extended translate
// coefficients (2^n + alpha1 + alpha2 + 1) under the masked Taylor boundary
// extension.  Row jj corresponds to translate j = jj - alpha2.
MatD extension_matrix(const BoundaryOperators& ops, const BetaMask& mask,
                      int n);

// Translate Gram matrices M_d[jj, kk] ~= int_0^1 Phi_j^(d)(x) Phi_k(x) dx for
// d = 0..2 over the extended translate range, by composite Simpson quadrature
// on the dyadic grid of level n + refine.  d = 1 carries the 2^n chain-rule
// scale; d = 2 is assembled by parts as [Phi'_j Phi_k]_0^1 - 2^{2n} x the
// first-derivative pair Gram, with the boundary term exact from the integer
// tables.  The entry set is identical for the serial and parallel paths.
std::vector<MatD> translate_grams(const FilterBank& bank,
                                  const ScalingTables& tables, int n,
                                  int refine, bool parallel = true);

struct SemiDiscreteSystem {
  CoifletSpec spec;
  int n = 0;
  int fields = 1;
  int quad_level = 0;          // dyadic quadrature level J (refine = J - n)
  std::vector<double> nodes;   // x_k = k / 2^n

  // Block operators over (field, node) unknowns; assembled once, never
  // updated during time stepping.
  MatD a, b, c, e;             // (fields * (2^n + 1)) square
  std::vector<double> g;       // initial nodal vector

  // Unknowns pinned by order-0 boundary constraints.  Pinned rows of the
  // precomputed products are zero, so pinned values stay exactly constant
  // under time stepping; the remaining rows solve the interior Galerkin
  // system.
  std::vector<unsigned char> pinned;  // per unknown, 1 = pinned
  MatD ai_b, ai_c, ai_e;              // A^{-1}B, A^{-1}C, A^{-1}E

  LiftedProblem lifted;  // problem in homogeneous form + lifting
  GalerkinBases bases;

  int node_count() const { return (1 << n) + 1; }
  int total_unknowns() const { return fields * node_count(); }
  // FNV-1a chain over the raw bytes of a, b, c, e, g.
  std::uint64_t matrix_checksum() const;
};

// Assemble the semi-discrete system at dyadic quadrature level J
// (quad_level < 0 selects the default n + 14).  The assembly is repeated at
// J + 1 and every operator entry must agree within 1e-10 relative to the
// operator's largest magnitude (absolute 1e-10 for unit-scale operators such
// as the Gram matrix A); QuadratureNotConverged otherwise.  Requires
// J >= n + 4.
SemiDiscreteSystem assemble(const PdeProblem& problem,
                            const GalerkinBases& bases, int quad_level = -1,
                            bool parallel = true);

// OdeSystem view: rhs(t, U) = A^{-1}B U + A^{-1}C N(U, x, t) + A^{-1}E F(t)
// with N and F evaluated nodally; the Jacobian is analytic (A^{-1}B plus the
// diagonal chain rule of N) whenever N is absent or nl_dmap is provided.
// The closures share one immutable copy of the system; the shared_ptr
// overload adopts the caller's instance instead, so decoupling checksums can
// be taken on the exact object the march reads.
OdeSystem semi_discretize(const SemiDiscreteSystem& system);
OdeSystem semi_discretize(std::shared_ptr<const SemiDiscreteSystem> system);

// Constrained-basis expansion of one field's nodal values at a dyadic point
// x in [0, 1], plus the lifting value when lifting is active.
double reconstruct(const SemiDiscreteSystem& system,
                   const std::vector<double>& nodal, double x,
                   double t = 0.0, int field = 0);

}  // namespace wtk
