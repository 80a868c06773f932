#include "wtk/interval.hpp"

#include <cmath>

namespace wtk {

namespace {

double pow_i(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

BoundaryOperators build_boundary_operators(const ScalingTables& tables) {
  const CoifletSpec& spec = tables.spec;
  const int N = spec.N;
  const int M1 = spec.M1;
  BoundaryOperators ops;
  ops.spec = spec;
  ops.alpha1 = M1 - 1;
  ops.alpha2 = 3 * N - 2 - M1;
  if (tables.max_derivative < N - 1)
    throw Error("build_boundary_operators: need derivatives up to N-1");

  // Note the role swap: zeta_b consumes the alpha2+1 nodes next to b and
  // controls the alpha1 right-exterior translates; zeta_a mirrors it.
  MatD b1(N, N);
  MatD b0(N, N);
  MatD a1r(N, ops.alpha2 + 1);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k <= ops.alpha2; ++k) a1r(i, k) = tables.phi(i, k + M1);
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int l = 1; l <= ops.alpha1; ++l)
        s += pow_i(double(l), j) / double(factorial_ld(j)) *
             tables.phi(i, M1 - l);
      b1(i, j) = s;
    }
  }
  MatD a0r(N, ops.alpha1 + 1);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k <= ops.alpha1; ++k) a0r(i, k) = tables.phi(i, M1 - k);
    for (int j = 0; j < N; ++j) {
      double s = 0.0;
      for (int l = 1; l <= ops.alpha2; ++l)
        s += pow_i(-double(l), j) / double(factorial_ld(j)) *
             tables.phi(i, M1 + l);
      b0(i, j) = s;
    }
  }
  MatD eye = MatD::identity(N);
  MatD ib1(N, N), ib0(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      ib1(i, j) = eye(i, j) - b1(i, j);
      ib0(i, j) = eye(i, j) - b0(i, j);
    }
  ops.zeta_b = solve_matrix(ib1, a1r);
  ops.zeta_a = solve_matrix(ib0, a0r);
  return ops;
}

void BetaMask::validate(int n) const {
  if (int(beta_L.size()) != n || int(beta_R.size()) != n)
    throw Error("BetaMask: wrong length");
  for (double x : beta_L)
    if (x != 0.0 && x != 1.0) throw Error("BetaMask: entries must be 0 or 1");
  for (double x : beta_R)
    if (x != 0.0 && x != 1.0) throw Error("BetaMask: entries must be 0 or 1");
}

double extension_weight(const BoundaryOperators& ops, const BetaMask& mask,
                        int m, double a, double b, Side side, int j,
                        double x) {
  const int N = ops.spec.N;
  const double scale = double(1 << m);
  double t = 0.0;
  if (side == Side::kLeft) {
    const double dx = x - a;
    double powm = 1.0, dxi = 1.0;
    for (int i = 0; i < N; ++i) {
      t += mask.beta_L[i] * powm * ops.zeta_a(i, j) /
           double(factorial_ld(i)) * dxi;
      powm *= scale;
      dxi *= dx;
    }
  } else {
    const double dx = x - b;
    double powm = 1.0, dxi = 1.0;
    for (int i = 0; i < N; ++i) {
      t += mask.beta_R[i] * powm * ops.zeta_b(i, j) /
           double(factorial_ld(i)) * dxi;
      powm *= scale;
      dxi *= dx;
    }
  }
  return t;
}

IntervalBasis::IntervalBasis(const FilterBank& bank,
                             const ScalingTables& tables,
                             const BoundaryOperators& ops, int m, double a,
                             double b, BetaMask mask)
    : bank_(bank),
      tables_(tables),
      ops_(ops),
      mask_(std::move(mask)),
      m_(m),
      a_(a),
      b_(b) {
  mask_.validate(ops_.spec.N);
  const double sa = std::ldexp(a, m), sb = std::ldexp(b, m);
  ka_ = int(std::lround(sa));
  kb_ = int(std::lround(sb));
  if (std::abs(sa - ka_) > 1e-9 || std::abs(sb - kb_) > 1e-9)
    throw Error("IntervalBasis: 2^m a and 2^m b must be integers");
  // Feasibility: the left stencil consumes alpha1+1 nodes, the right stencil
  // alpha2+1, and they may share at most the full node set once.
  if (kb_ - ka_ + 1 < ops_.alpha1 + ops_.alpha2 + 2)
    throw ResolutionTooLow(
        "IntervalBasis: fewer nodes than the combined boundary stencils");
}

std::vector<double> IntervalBasis::extend(
    const std::vector<double>& samples) const {
  const int N = ops_.spec.N;
  const int a1 = ops_.alpha1, a2 = ops_.alpha2;
  if (int(samples.size()) != node_count())
    throw Error("extend: samples length != node count");

  // Boundary derivative reconstructions D_a[i] ~ f^(i)(a)/2^{im},
  // D_b[i] ~ f^(i)(b)/2^{im} in grid-scaled units.
  std::vector<double> da(N, 0.0), db(N, 0.0);
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int c = 0; c <= a1; ++c) s += ops_.zeta_a(i, c) * samples[c];
    da[i] = s;
    s = 0.0;
    const int last = node_count() - 1;
    for (int c = 0; c <= a2; ++c) s += ops_.zeta_b(i, c) * samples[last - c];
    db[i] = s;
  }

  std::vector<double> out;
  out.reserve(node_count() + a1 + a2);
  for (int l = a2; l >= 1; --l) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      s += mask_.beta_L[i] * pow_i(-double(l), i) /
           double(factorial_ld(i)) * da[i];
    out.push_back(s);
  }
  out.insert(out.end(), samples.begin(), samples.end());
  for (int l = 1; l <= a1; ++l) {
    double s = 0.0;
    for (int i = 0; i < N; ++i)
      s += mask_.beta_R[i] * pow_i(double(l), i) /
           double(factorial_ld(i)) * db[i];
    out.push_back(s);
  }
  return out;
}

std::vector<double> IntervalBasis::eval_grid(
    const std::vector<double>& extended, int J, int deriv) const {
  const int a1 = ops_.alpha1, a2 = ops_.alpha2;
  if (int(extended.size()) != node_count() + a1 + a2)
    throw Error("eval_grid: extended coefficients have wrong length");
  if (J < m_) throw ResolutionTooLow("eval_grid: J must be >= m");

  const int r = J - m_;
  const long L = bank_.spec.support_end();
  const long nq = long(kb_ - ka_) << r;
  const std::vector<double> w = cascade_table(bank_, deriv, r);
  std::vector<double> out(nq + 1, 0.0);
  const double scale = std::ldexp(1.0, deriv * m_);
  for (size_t jj = 0; jj < extended.size(); ++jj) {
    const double fj = extended[jj];
    if (fj == 0.0) continue;
    const long j = ka_ - a2 + long(jj);
    const long off = (ka_ - j + bank_.spec.M1) << r;
    const long lo = std::max(0L, -off);
    const long hi = std::min(nq, (L << r) - off);
    for (long q = lo; q <= hi; ++q) out[q] += fj * scale * w[q + off];
  }
  return out;
}

std::vector<double> IntervalBasis::approximate_grid(
    const std::vector<double>& samples, int J, int deriv) const {
  return eval_grid(extend(samples), J, deriv);
}

double IntervalBasis::basis_eval(int k, double x) const {
  std::vector<double> e(node_count(), 0.0);
  if (k < 0 || k >= node_count()) throw Error("basis_eval: node out of range");
  e[k] = 1.0;
  return approximate_at(e, x);
}

double IntervalBasis::approximate_at(const std::vector<double>& samples,
                                     double x) const {
  // Locate the smallest dyadic level >= m containing x.
  for (int J = m_; J <= 24; ++J) {
    const double q = std::ldexp(x - a_, J);
    const double qr = std::round(q);
    if (std::abs(q - qr) < 1e-9) {
      const std::vector<double> vals = approximate_grid(samples, J);
      return vals[size_t(qr)];
    }
  }
  throw ResolutionTooLow("approximate_at: x is not on a dyadic grid");
}

ErrorStudyResult error_study(const FilterBank& bank,
                             const std::function<double(double)>& f,
                             const std::function<double(double)>& exact,
                             const std::vector<int>& m_list, double a,
                             double b, int probe_refine) {
  const ScalingTables tables = build_scaling_tables(bank);
  const BoundaryOperators ops = build_boundary_operators(tables);
  const BetaMask mask = BetaMask::all_ones(bank.spec.N);

  ErrorStudyResult res;
  std::vector<double> xs_fit, ys_fit;
  for (int m : m_list) {
    ErrorStudyRow row;
    row.m = m;
    try {
      IntervalBasis basis(bank, tables, ops, m, a, b, mask);
      std::vector<double> samples(basis.node_count());
      for (int k = 0; k < basis.node_count(); ++k)
        samples[k] = f(basis.node(k));
      const int J = m + probe_refine;
      const std::vector<double> vals = basis.approximate_grid(samples, J);
      double worst = 0.0;
      for (size_t q = 0; q < vals.size(); ++q) {
        const double x = a + std::ldexp(double(q), -J);
        worst = std::max(worst, std::abs(vals[q] - exact(x)));
      }
      row.max_error = worst;
      if (worst > 1e-13) {
        xs_fit.push_back(double(m));
        ys_fit.push_back(std::log2(worst));
      }
    } catch (const ResolutionTooLow&) {
      row.feasible = false;
      row.max_error = std::nan("");
    }
    res.rows.push_back(row);
  }

  double worst_feasible = 0.0;
  int n_feasible = 0;
  for (const ErrorStudyRow& r : res.rows)
    if (r.feasible) {
      worst_feasible = std::max(worst_feasible, r.max_error);
      ++n_feasible;
    }
  res.exact = n_feasible > 0 && worst_feasible <= 1e-10;
  if (!res.exact && xs_fit.size() >= 2)
    res.slope = fit_slope(xs_fit, ys_fit);
  else
    res.slope = std::nan("");
  return res;
}

}  // namespace wtk
