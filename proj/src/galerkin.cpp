#include "wtk/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <utility>

namespace wtk {

namespace {

double max_abs(const MatD& m) {
  double v = 0.0;
  for (double x : m.data()) v = std::max(v, std::abs(x));
  return v;
}

// St^T M^T Strial: the Gram matrices are stored as M[j, k] = int Phi_j^(d)
// Phi_k, while the operator entry (l, k) integrates the derivative applied to
// the trial member k against the test member l, hence the transpose.
MatD sandwich(const MatD& st_test, const MatD& m, const MatD& s_trial) {
  return matmul(matmul(st_test.transposed(), m.transposed()), s_trial);
}

void add_block(MatD& dst, int block_row, int block_col, int nn, const MatD& blk,
               double scale) {
  for (int i = 0; i < nn; ++i)
    for (int j = 0; j < nn; ++j)
      dst(block_row * nn + i, block_col * nn + j) += scale * blk(i, j);
}

// Composite Simpson dot of two translate slices on the level-J grid.  The
// products are formed in double and accumulated in extended precision; the
// sequence of operations is identical on the serial and parallel paths, so
// the assembled matrices match bitwise.
double pair_integral(const std::vector<double>& wa,
                     const std::vector<double>& wb, int m1, int r,
                     long long nq, long long top, int j, int k, double w1) {
  const long long offj = static_cast<long long>(m1 - j) << r;
  const long long offk = static_cast<long long>(m1 - k) << r;
  const long long qlo = std::max<long long>(0, std::max(-offj, -offk));
  const long long qhi =
      std::min<long long>(nq, std::min<long long>(top - offj, top - offk));
  if (qlo > qhi) return 0.0;
  long double acc = 0.0L;
  for (long long q = qlo; q <= qhi; ++q) {
    const double prod =
        wa[static_cast<size_t>(q + offj)] * wb[static_cast<size_t>(q + offk)];
    const double wq =
        (q == 0 || q == nq) ? w1 : ((q & 1) ? 4.0 * w1 : 2.0 * w1);
    acc += static_cast<long double>(prod * wq);
  }
  return static_cast<double>(acc);
}

MatD gram_pair(const std::vector<double>& wa, const std::vector<double>& wb,
               int nj, int a2, int m1, int r, long long nq, long long top,
               int band, double w1, bool parallel) {
  MatD g(nj, nj);
  const int total = nj * nj;
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int idx = 0; idx < total; ++idx) {
      const int jj = idx / nj, kk = idx % nj;
      if (std::abs(jj - kk) >= band) continue;
      g(jj, kk) =
          pair_integral(wa, wb, m1, r, nq, top, jj - a2, kk - a2, w1);
    }
  } else {
    for (int idx = 0; idx < total; ++idx) {
      const int jj = idx / nj, kk = idx % nj;
      if (std::abs(jj - kk) >= band) continue;
      g(jj, kk) =
          pair_integral(wa, wb, m1, r, nq, top, jj - a2, kk - a2, w1);
    }
  }
  return g;
}

struct BlockOperators {
  MatD a, b, c, e;
};

BlockOperators assemble_operators(const PdeProblem& problem,
                                  const GalerkinBases& bases,
                                  const std::vector<MatD>& st, const MatD& sf,
                                  int refine, bool parallel) {
  const int n = bases.n;
  const int nn = bases.node_count();
  const int nf = problem.fields;
  const int dim = nf * nn;
  const std::vector<MatD> grams =
      translate_grams(bases.bank, bases.tables, n, refine, parallel);

  BlockOperators out{MatD(dim, dim), MatD(dim, dim), MatD(dim, dim),
                     MatD(dim, dim)};
  for (int f = 0; f < nf; ++f) {
    add_block(out.a, f, f, nn, sandwich(st[size_t(f)], grams[0], st[size_t(f)]),
              1.0);
    add_block(out.e, f, f, nn, sandwich(st[size_t(f)], grams[0], sf), 1.0);
  }
  for (const LinearTerm& lt : problem.linear_terms)
    add_block(out.b, lt.target, lt.source, nn,
              sandwich(st[size_t(lt.target)], grams[size_t(lt.order)],
                       st[size_t(lt.source)]),
              lt.coeff);
  if (problem.has_nonlinearity())
    add_block(out.c, problem.nl_target, problem.nl_target, nn,
              sandwich(st[size_t(problem.nl_target)],
                       grams[size_t(problem.nl_order)], sf),
              problem.nl_coeff);
  return out;
}

void check_operator_agreement(const char* name, const MatD& coarse,
                              const MatD& fine, int quad_level) {
  double dev = 0.0;
  for (size_t i = 0; i < coarse.data().size(); ++i)
    dev = std::max(dev, std::abs(coarse.data()[i] - fine.data()[i]));
  const double gate = 1e-10 * std::max(1.0, max_abs(fine));
  if (!(dev <= gate)) {
    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "assemble: operator %s deviates by %.3e between quadrature "
                  "levels %d and %d (gate %.3e)",
                  name, dev, quad_level, quad_level + 1, gate);
    throw QuadratureNotConverged(buf);
  }
}

}  // namespace

void PdeProblem::validate(const CoifletSpec& spec) const {
  if (fields < 1) throw Error("PdeProblem: fields must be positive");
  auto check_size = [&](size_t got, const char* what) {
    if (got != 0 && got != static_cast<size_t>(fields))
      throw Error(std::string("PdeProblem: ") + what +
                  " must be empty or have one entry per field");
  };
  check_size(forcing.size(), "forcing");
  check_size(initial.size(), "initial");
  check_size(bc_left.size(), "bc_left");
  check_size(bc_right.size(), "bc_right");
  check_size(dirichlet.size(), "dirichlet");
  for (const LinearTerm& lt : linear_terms) {
    if (lt.target < 0 || lt.target >= fields || lt.source < 0 ||
        lt.source >= fields)
      throw Error("PdeProblem: linear term field index out of range");
    if (lt.order < 0 || lt.order > 2)
      throw Error("PdeProblem: linear term derivative order must be 0..2");
    if (!std::isfinite(lt.coeff))
      throw Error("PdeProblem: linear term coefficient must be finite");
  }
  if (nl_map) {
    if (nl_target < 0 || nl_target >= fields)
      throw Error("PdeProblem: nonlinear target field out of range");
    if (nl_order < 0 || nl_order > 2)
      throw Error("PdeProblem: nonlinear derivative order must be 0..2");
    if (!std::isfinite(nl_coeff))
      throw Error("PdeProblem: nonlinear coefficient must be finite");
  }
  auto check_orders = [&](const std::vector<std::vector<int>>& bc,
                          const char* side) {
    for (const auto& orders : bc)
      for (int o : orders)
        if (o < 0 || o >= spec.N)
          throw Error(std::string("PdeProblem: ") + side +
                      " boundary order outside 0..N-1");
  };
  check_orders(bc_left, "left");
  check_orders(bc_right, "right");
  for (const DirichletData& d : dirichlet) {
    if ((d.g0 && !d.g0_dt) || (d.g1 && !d.g1_dt))
      throw Error(
          "PdeProblem: Dirichlet data requires its time derivative for the "
          "lifting");
  }
}

LiftedProblem lift_boundary(const PdeProblem& problem) {
  LiftedProblem out;
  out.problem = problem;
  out.active = false;
  out.lift = [](int, double, double) { return 0.0; };

  bool any = false;
  for (const DirichletData& d : problem.dirichlet)
    if (!d.empty()) any = true;
  if (!any) return out;

  const int nf = problem.fields;
  std::vector<DirichletData> dir = problem.dirichlet;
  dir.resize(static_cast<size_t>(nf));

  auto clamps_order0 = [](const std::vector<std::vector<int>>& bc, int f) {
    if (bc.empty()) return false;
    for (int o : bc[static_cast<size_t>(f)])
      if (o == 0) return true;
    return false;
  };
  for (int f = 0; f < nf; ++f) {
    const DirichletData& d = dir[static_cast<size_t>(f)];
    if (d.g0 && !clamps_order0(problem.bc_left, f))
      throw UnsupportedBc(
          "lift_boundary: left boundary data on a field without an order-0 "
          "constraint");
    if (d.g1 && !clamps_order0(problem.bc_right, f))
      throw UnsupportedBc(
          "lift_boundary: right boundary data on a field without an order-0 "
          "constraint");
    if ((d.g0 && !d.g0_dt) || (d.g1 && !d.g1_dt))
      throw Error("lift_boundary: Dirichlet data requires its time derivative");
  }

  auto lift_val = [dir](int f, double x, double t) {
    const DirichletData& d = dir[static_cast<size_t>(f)];
    double v = 0.0;
    if (d.g0) v += (1.0 - x) * d.g0(t);
    if (d.g1) v += x * d.g1(t);
    return v;
  };
  auto lift_dt = [dir](int f, double x, double t) {
    const DirichletData& d = dir[static_cast<size_t>(f)];
    double v = 0.0;
    if (d.g0_dt) v += (1.0 - x) * d.g0_dt(t);
    if (d.g1_dt) v += x * d.g1_dt(t);
    return v;
  };
  auto lift_dx = [dir](int f, double t) {
    const DirichletData& d = dir[static_cast<size_t>(f)];
    double v = 0.0;
    if (d.g1) v += d.g1(t);
    if (d.g0) v -= d.g0(t);
    return v;
  };

  // Forcing of the transformed problem: the linear terms applied to the
  // lifting are known functions of (x, t) and move to the right-hand side
  // along with -d(ell)/dt; the second x-derivative of a linear lifting
  // vanishes.
  std::vector<std::function<double(double, double)>> base_forcing =
      problem.forcing;
  base_forcing.resize(static_cast<size_t>(nf));
  const std::vector<LinearTerm> terms = problem.linear_terms;
  out.problem.forcing.assign(static_cast<size_t>(nf), {});
  for (int tf = 0; tf < nf; ++tf) {
    auto base = base_forcing[static_cast<size_t>(tf)];
    out.problem.forcing[static_cast<size_t>(tf)] =
        [base, terms, tf, lift_val, lift_dx, lift_dt](double x, double t) {
          double v = base ? base(x, t) : 0.0;
          for (const LinearTerm& lt : terms) {
            if (lt.target != tf) continue;
            if (lt.order == 0)
              v += lt.coeff * lift_val(lt.source, x, t);
            else if (lt.order == 1)
              v += lt.coeff * lift_dx(lt.source, t);
          }
          v -= lift_dt(tf, x, t);
          return v;
        };
  }

  if (problem.nl_map) {
    auto base_map = problem.nl_map;
    out.problem.nl_map = [base_map, lift_val, nf](const std::vector<double>& v,
                                                  double x, double t) {
      std::vector<double> u(v);
      for (int f = 0; f < nf; ++f)
        u[static_cast<size_t>(f)] += lift_val(f, x, t);
      return base_map(u, x, t);
    };
    if (problem.nl_dmap) {
      auto base_dmap = problem.nl_dmap;
      out.problem.nl_dmap = [base_dmap, lift_val, nf](
                                const std::vector<double>& v, double x,
                                double t, int field) {
        std::vector<double> u(v);
        for (int f = 0; f < nf; ++f)
          u[static_cast<size_t>(f)] += lift_val(f, x, t);
        return base_dmap(u, x, t, field);
      };
    }
  }

  std::vector<std::function<double(double)>> base_initial = problem.initial;
  base_initial.resize(static_cast<size_t>(nf));
  out.problem.initial.assign(static_cast<size_t>(nf), {});
  for (int f = 0; f < nf; ++f) {
    auto gi = base_initial[static_cast<size_t>(f)];
    out.problem.initial[static_cast<size_t>(f)] = [gi, lift_val, f](double x) {
      return (gi ? gi(x) : 0.0) - lift_val(f, x, 0.0);
    };
  }

  out.problem.dirichlet.clear();
  out.active = true;
  out.lift = lift_val;
  return out;
}

BetaMask mask_for_orders(int n_coif, const std::vector<int>& left,
                         const std::vector<int>& right) {
  BetaMask mask = BetaMask::all_ones(n_coif);
  for (int o : left) {
    if (o < 0 || o >= n_coif)
      throw Error("mask_for_orders: derivative order outside 0..N-1");
    mask.beta_L[static_cast<size_t>(o)] = 0.0;
  }
  for (int o : right) {
    if (o < 0 || o >= n_coif)
      throw Error("mask_for_orders: derivative order outside 0..N-1");
    mask.beta_R[static_cast<size_t>(o)] = 0.0;
  }
  return mask;
}

GalerkinBases build_bases(const FilterBank& bank, const ScalingTables& tables,
                          const BoundaryOperators& ops, int n,
                          const PdeProblem& problem) {
  problem.validate(bank.spec);
  const int a1 = ops.alpha1, a2 = ops.alpha2;
  if (n < 1 || (1 << n) + 1 < a1 + a2 + 2)
    throw ResolutionTooLow(
        "build_bases: 2^n + 1 nodes cannot carry the boundary extension "
        "stencils");
  GalerkinBases bases;
  bases.spec = bank.spec;
  bases.n = n;
  bases.bank = bank;
  bases.tables = tables;
  bases.ops = ops;
  bases.free_mask = BetaMask::all_ones(bank.spec.N);
  static const std::vector<int> kNoOrders;
  for (int f = 0; f < problem.fields; ++f) {
    const std::vector<int>& left =
        problem.bc_left.empty() ? kNoOrders
                                : problem.bc_left[static_cast<size_t>(f)];
    const std::vector<int>& right =
        problem.bc_right.empty() ? kNoOrders
                                 : problem.bc_right[static_cast<size_t>(f)];
    bases.constrained.push_back(mask_for_orders(bank.spec.N, left, right));
  }
  return bases;
}

MatD extension_matrix(const BoundaryOperators& ops, const BetaMask& mask,
                      int n) {
  const int N = ops.spec.N;
  mask.validate(N);
  const int a1 = ops.alpha1, a2 = ops.alpha2;
  const int nn = (1 << n) + 1;
  if (nn < a1 + a2 + 2)
    throw ResolutionTooLow(
        "extension_matrix: 2^n + 1 nodes cannot carry the boundary extension "
        "stencils");
  const int nj = (1 << n) + a1 + a2 + 1;
  MatD s(nj, nn);
  for (int k = 0; k < nn; ++k) s(a2 + k, k) = 1.0;
  for (int l = 1; l <= a2; ++l) {  // left exterior translate j = -l
    for (int c = 0; c <= a1; ++c) {
      long double w = 0.0L;
      long double pw = 1.0L;  // (-l)^i / i!
      for (int i = 0; i < N; ++i) {
        if (i > 0) pw *= static_cast<long double>(-l) / i;
        if (mask.beta_L[static_cast<size_t>(i)] != 0.0)
          w += pw * static_cast<long double>(ops.zeta_a(i, c));
      }
      s(a2 - l, c) += static_cast<double>(w);
    }
  }
  for (int l = 1; l <= a1; ++l) {  // right exterior translate j = 2^n + l
    for (int c = 0; c <= a2; ++c) {
      long double w = 0.0L;
      long double pw = 1.0L;  // l^i / i!
      for (int i = 0; i < N; ++i) {
        if (i > 0) pw *= static_cast<long double>(l) / i;
        if (mask.beta_R[static_cast<size_t>(i)] != 0.0)
          w += pw * static_cast<long double>(ops.zeta_b(i, c));
      }
      s(a2 + (1 << n) + l, (1 << n) - c) += static_cast<double>(w);
    }
  }
  return s;
}

std::vector<MatD> translate_grams(const FilterBank& bank,
                                  const ScalingTables& tables, int n,
                                  int refine, bool parallel) {
  if (n < 1) throw Error("translate_grams: resolution level must be positive");
  if (refine < 1) throw Error("translate_grams: refine level must be positive");
  const CoifletSpec& spec = bank.spec;
  const int N = spec.N, m1 = spec.M1;
  const int a1 = tables.alpha1(), a2 = tables.alpha2();
  const int band = 3 * N - 1;
  const int nj = (1 << n) + a1 + a2 + 1;
  const int r = refine;
  const int J = n + r;
  const long long nq = 1LL << J;
  const long long top = static_cast<long long>(band) << r;
  const double w1 = std::ldexp(1.0, -J) / 3.0;

  const std::vector<double> w0 = cascade_table(bank, 0, r);
  const std::vector<double> w1d = cascade_table(bank, 1, r);

  std::vector<MatD> m;
  m.push_back(gram_pair(w0, w0, nj, a2, m1, r, nq, top, band, w1, parallel));
  MatD g10 = gram_pair(w1d, w0, nj, a2, m1, r, nq, top, band, w1, parallel);
  for (double& x : g10.data()) x = std::ldexp(x, n);
  m.push_back(std::move(g10));

  // Second derivative by parts: [Phi'_j Phi_k]_0^1 - int Phi'_j Phi'_k, with
  // the boundary term exact from the integer tables.
  MatD g11 = gram_pair(w1d, w1d, nj, a2, m1, r, nq, top, band, w1, parallel);
  MatD m2(nj, nj);
  for (int jj = 0; jj < nj; ++jj) {
    const int j = jj - a2;
    for (int kk = 0; kk < nj; ++kk) {
      const int k = kk - a2;
      const double bt =
          std::ldexp(tables.phi(1, (1 << n) + m1 - j) *
                             tables.phi(0, (1 << n) + m1 - k) -
                         tables.phi(1, m1 - j) * tables.phi(0, m1 - k),
                     n);
      m2(jj, kk) = bt - std::ldexp(g11(jj, kk), 2 * n);
    }
  }
  m.push_back(std::move(m2));
  return m;
}

SemiDiscreteSystem assemble(const PdeProblem& problem,
                            const GalerkinBases& bases, int quad_level,
                            bool parallel) {
  problem.validate(bases.spec);
  if (static_cast<int>(bases.constrained.size()) != problem.fields)
    throw Error("assemble: bases do not match the problem's field count");
  const int n = bases.n;
  const int J = quad_level < 0 ? n + 14 : quad_level;
  if (J < n + 4)
    throw Error("assemble: quadrature level must be at least n + 4");

  SemiDiscreteSystem sys;
  sys.spec = bases.spec;
  sys.n = n;
  sys.fields = problem.fields;
  sys.quad_level = J;
  sys.bases = bases;
  sys.lifted = lift_boundary(problem);

  const int nn = sys.node_count();
  const int nf = sys.fields;
  const int dim = nf * nn;
  sys.nodes.resize(static_cast<size_t>(nn));
  for (int k = 0; k < nn; ++k)
    sys.nodes[static_cast<size_t>(k)] = std::ldexp(double(k), -n);

  std::vector<MatD> st;
  for (int f = 0; f < nf; ++f)
    st.push_back(
        extension_matrix(bases.ops, bases.constrained[static_cast<size_t>(f)], n));
  const MatD sf = extension_matrix(bases.ops, bases.free_mask, n);

  BlockOperators coarse =
      assemble_operators(problem, bases, st, sf, J - n, parallel);
  BlockOperators fine =
      assemble_operators(problem, bases, st, sf, J - n + 1, parallel);
  check_operator_agreement("A", coarse.a, fine.a, J);
  check_operator_agreement("B", coarse.b, fine.b, J);
  check_operator_agreement("C", coarse.c, fine.c, J);
  check_operator_agreement("E", coarse.e, fine.e, J);
  sys.a = std::move(coarse.a);
  sys.b = std::move(coarse.b);
  sys.c = std::move(coarse.c);
  sys.e = std::move(coarse.e);

  sys.g.assign(static_cast<size_t>(dim), 0.0);
  const PdeProblem& hp = sys.lifted.problem;
  for (int f = 0; f < nf; ++f) {
    if (hp.initial.empty() || !hp.initial[static_cast<size_t>(f)]) continue;
    for (int k = 0; k < nn; ++k)
      sys.g[static_cast<size_t>(f * nn + k)] =
          hp.initial[static_cast<size_t>(f)](sys.nodes[static_cast<size_t>(k)]);
  }

  // Order-0 boundary constraints pin the boundary unknowns: their rows are
  // removed from the Galerkin solve and zeroed in the precomputed products.
  sys.pinned.assign(static_cast<size_t>(dim), 0);
  auto clamps_order0 = [](const std::vector<std::vector<int>>& bc, int f) {
    if (bc.empty()) return false;
    for (int o : bc[static_cast<size_t>(f)])
      if (o == 0) return true;
    return false;
  };
  for (int f = 0; f < nf; ++f) {
    if (clamps_order0(problem.bc_left, f))
      sys.pinned[static_cast<size_t>(f * nn)] = 1;
    if (clamps_order0(problem.bc_right, f))
      sys.pinned[static_cast<size_t>(f * nn + nn - 1)] = 1;
  }
  std::vector<int> active;
  for (int i = 0; i < dim; ++i)
    if (!sys.pinned[static_cast<size_t>(i)]) active.push_back(i);
  const int na = static_cast<int>(active.size());

  MatD a_act(na, na);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      a_act(i, j) =
          sys.a(active[static_cast<size_t>(i)], active[static_cast<size_t>(j)]);
  auto reduce_solve = [&](const MatD& full) {
    MatD rows(na, dim);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < dim; ++j)
        rows(i, j) = full(active[static_cast<size_t>(i)], j);
    MatD sol = solve_matrix(a_act, std::move(rows));
    MatD embedded(dim, dim);
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < dim; ++j)
        embedded(active[static_cast<size_t>(i)], j) = sol(i, j);
    return embedded;
  };
  sys.ai_b = reduce_solve(sys.b);
  sys.ai_c = reduce_solve(sys.c);
  sys.ai_e = reduce_solve(sys.e);
  return sys;
}

std::uint64_t SemiDiscreteSystem::matrix_checksum() const {
  std::uint64_t cs = checksum(a, 0xcbf29ce484222325ULL);
  cs = checksum(b, cs);
  cs = checksum(c, cs);
  cs = checksum(e, cs);
  cs = checksum(g, cs);
  return cs;
}

OdeSystem semi_discretize(const SemiDiscreteSystem& system) {
  return semi_discretize(std::make_shared<const SemiDiscreteSystem>(system));
}

OdeSystem semi_discretize(std::shared_ptr<const SemiDiscreteSystem> system) {
  if (!system) throw Error("semi_discretize: null system");
  auto sys = std::move(system);
  OdeSystem ode;
  ode.dimension = sys->total_unknowns();
  ode.t0 = 0.0;

  ode.rhs = [sys](double t, const Vec& y) {
    const SemiDiscreteSystem& s = *sys;
    const int nn = s.node_count();
    const int nf = s.fields;
    const int dim = nf * nn;
    Vec out = matvec(s.ai_b, y);
    const PdeProblem& p = s.lifted.problem;
    if (p.nl_map) {
      std::vector<double> u(static_cast<size_t>(nf));
      for (int k = 0; k < nn; ++k) {
        for (int f = 0; f < nf; ++f)
          u[static_cast<size_t>(f)] = y[static_cast<size_t>(f * nn + k)];
        const double nv = p.nl_map(u, s.nodes[static_cast<size_t>(k)], t);
        if (nv == 0.0) continue;
        const int col = p.nl_target * nn + k;
        for (int i = 0; i < dim; ++i) out[static_cast<size_t>(i)] += s.ai_c(i, col) * nv;
      }
    }
    for (int f = 0; f < nf; ++f) {
      if (p.forcing.empty() || !p.forcing[static_cast<size_t>(f)]) continue;
      for (int k = 0; k < nn; ++k) {
        const double fv =
            p.forcing[static_cast<size_t>(f)](s.nodes[static_cast<size_t>(k)], t);
        if (fv == 0.0) continue;
        const int col = f * nn + k;
        for (int i = 0; i < dim; ++i) out[static_cast<size_t>(i)] += s.ai_e(i, col) * fv;
      }
    }
    return out;
  };

  if (!sys->lifted.problem.nl_map || sys->lifted.problem.nl_dmap) {
    ode.jacobian = [sys](double t, const Vec& y) {
      const SemiDiscreteSystem& s = *sys;
      MatD jac = s.ai_b;
      const PdeProblem& p = s.lifted.problem;
      if (p.nl_map) {
        const int nn = s.node_count();
        const int nf = s.fields;
        const int dim = nf * nn;
        std::vector<double> u(static_cast<size_t>(nf));
        for (int k = 0; k < nn; ++k) {
          for (int f = 0; f < nf; ++f)
            u[static_cast<size_t>(f)] = y[static_cast<size_t>(f * nn + k)];
          const int col = p.nl_target * nn + k;
          for (int f = 0; f < nf; ++f) {
            const double d =
                p.nl_dmap(u, s.nodes[static_cast<size_t>(k)], t, f);
            if (d == 0.0) continue;
            const int yc = f * nn + k;
            for (int i = 0; i < dim; ++i) jac(i, yc) += s.ai_c(i, col) * d;
          }
        }
      }
      return jac;
    };
  }
  return ode;
}

double reconstruct(const SemiDiscreteSystem& system,
                   const std::vector<double>& nodal, double x, double t,
                   int field) {
  if (field < 0 || field >= system.fields)
    throw Error("reconstruct: field index out of range");
  if (static_cast<int>(nodal.size()) != system.node_count())
    throw Error("reconstruct: nodal vector size mismatch");
  IntervalBasis basis(system.bases.bank, system.bases.tables, system.bases.ops,
                      system.n, 0.0, 1.0,
                      system.bases.constrained[static_cast<size_t>(field)]);
  double v = basis.approximate_at(nodal, x);
  if (system.lifted.active) v += system.lifted.lift(field, x, t);
  return v;
}

}  // namespace wtk
