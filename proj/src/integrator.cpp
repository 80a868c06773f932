#include "wtk/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>

#include "wtk/errors.hpp"

namespace wtk {

namespace {

double norm_inf(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

Vec axpy(const Vec& y, double a, const Vec& x) {
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * x[i];
  return out;
}

// Forward-difference Jacobian of f(t, .) about y.
MatD numeric_jacobian(const std::function<Vec(double, const Vec&)>& f, double t,
                      const Vec& y, const Vec& f0) {
  const int n = int(y.size());
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  MatD jac(n, n);
  Vec yp = y;
  for (int c = 0; c < n; ++c) {
    const double delta = root_eps * std::max(1.0, std::abs(y[c]));
    yp[c] = y[c] + delta;
    const Vec fp = f(t, yp);
    yp[c] = y[c];
    for (int r = 0; r < n; ++r) jac(r, c) = (fp[r] - f0[r]) / delta;
  }
  return jac;
}

// Damped Newton for g(z) = z - c f(t, z) - rhs = 0.
Vec solve_implicit(const std::function<Vec(double, const Vec&)>& f,
                   const std::function<MatD(double, const Vec&)>& jac_fn,
                   double t, double c, const Vec& rhs, const Vec& z0,
                   const SolverConfig& config, StepDiagnostics* diag) {
  const int n = int(rhs.size());
  auto g = [&](const Vec& z) {
    Vec fz = f(t, z);
    Vec r(n);
    for (int i = 0; i < n; ++i) r[i] = z[i] - c * fz[i] - rhs[i];
    return r;
  };

  Vec z = z0;
  if (config.fixed_point) {
    for (int it = 0; it < config.max_iterations; ++it) {
      Vec fz = f(t, z);
      Vec znew = axpy(rhs, c, fz);
      double dz = 0.0;
      for (int i = 0; i < n; ++i) dz = std::max(dz, std::abs(znew[i] - z[i]));
      z = std::move(znew);
      if (!finite(z)) throw NewtonDivergence("fixed-point iterate not finite");
      if (dz <= config.rtol * norm_inf(z) + config.atol) {
        if (diag) {
          diag->iterations = it + 1;
          diag->residual = norm_inf(g(z));
        }
        return z;
      }
    }
    throw NewtonDivergence("fixed-point iteration did not converge in " +
                           std::to_string(config.max_iterations) + " sweeps");
  }

  double last_norm = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < config.max_iterations; ++it) {
    const Vec r = g(z);
    const double n0 = norm_inf(r);
    last_norm = n0;
    const Vec fz = f(t, z);
    MatD jf = jac_fn ? jac_fn(t, z) : numeric_jacobian(f, t, z, fz);
    MatD m = MatD::identity(n);
    for (int rr = 0; rr < n; ++rr) {
      for (int cc = 0; cc < n; ++cc) m(rr, cc) -= c * jf(rr, cc);
    }
    Vec neg(n);
    for (int i = 0; i < n; ++i) neg[i] = -r[i];
    Vec dz;
    try {
      dz = solve(m, neg);
    } catch (const Singular&) {
      throw SingularIteration("singular Newton matrix at t = " +
                              std::to_string(t));
    }

    double lam = 1.0;
    Vec zt;
    double nt = 0.0;
    while (true) {
      zt = axpy(z, lam, dz);
      nt = norm_inf(g(zt));
      if (nt <= (1.0 - 0.25 * lam) * n0 || lam < 1e-6) break;
      lam *= 0.5;
    }
    z = std::move(zt);
    if (lam * norm_inf(dz) <= config.rtol * norm_inf(z) + config.atol &&
        finite(z)) {
      if (diag) {
        diag->iterations = it + 1;
        diag->residual = nt;
      }
      return z;
    }
    last_norm = nt;
  }
  throw NewtonDivergence("Newton iteration did not converge in " +
                         std::to_string(config.max_iterations) +
                         " steps (residual " + std::to_string(last_norm) +
                         " at t = " + std::to_string(t) + ")");
}

// Derivatives at the window start from divided differences: build the
// Newton-form interpolant on nodes xs (relative to the start), expand to
// monomials, scale by i!.
std::vector<Vec> dd_derivatives(const std::vector<double>& xs,
                                const std::vector<Vec>& ys, int n_order) {
  const int npt = int(xs.size());
  const int dim = int(ys.front().size());

  std::vector<std::vector<Vec>> table;
  table.push_back(ys);
  for (int k = 1; k < npt; ++k) {
    std::vector<Vec> row;
    row.reserve(npt - k);
    for (int i = 0; i + k < npt; ++i) {
      Vec d(dim);
      const double dx = xs[i + k] - xs[i];
      for (int cc = 0; cc < dim; ++cc) {
        d[cc] = (table[k - 1][i + 1][cc] - table[k - 1][i][cc]) / dx;
      }
      row.push_back(std::move(d));
    }
    table.push_back(std::move(row));
  }

  // Horner expansion of sum_k c_k prod_{j<k}(x - xs[j]) into monomials.
  std::vector<Vec> mono;
  for (int k = npt - 1; k >= 0; --k) {
    std::vector<Vec> next(mono.size() + 1, Vec(dim, 0.0));
    for (std::size_t p = 0; p < mono.size(); ++p) {
      for (int cc = 0; cc < dim; ++cc) {
        next[p + 1][cc] += mono[p][cc];
        next[p][cc] -= xs[k] * mono[p][cc];
      }
    }
    for (int cc = 0; cc < dim; ++cc) next[0][cc] += table[k][0][cc];
    mono = std::move(next);
  }

  std::vector<Vec> derivs;
  derivs.reserve(n_order);
  for (int i = 0; i < n_order; ++i) {
    Vec d(dim, 0.0);
    if (i < int(mono.size())) {
      const double fact = double(factorial_ld(i));
      for (int cc = 0; cc < dim; ++cc) d[cc] = mono[i][cc] * fact;
    }
    derivs.push_back(std::move(d));
  }
  return derivs;
}

// Classical fourth-order one-step reference over nodes t0 + i h,
// i = 0..n_order-1, with nsub substeps per node gap.
std::vector<Vec> rk4_window(const std::function<Vec(double, const Vec&)>& f,
                            double t0, const Vec& y0, double h, int n_order,
                            int nsub) {
  const int dim = int(y0.size());
  std::vector<Vec> ys;
  ys.reserve(n_order);
  ys.push_back(y0);
  Vec y = y0;
  double t = t0;
  for (int i = 1; i < n_order; ++i) {
    const double target = t0 + i * h;
    const double step = (target - t) / nsub;
    for (int s = 0; s < nsub; ++s) {
      const Vec k1 = f(t, y);
      const Vec k2 = f(t + 0.5 * step, axpy(y, 0.5 * step, k1));
      const Vec k3 = f(t + 0.5 * step, axpy(y, 0.5 * step, k2));
      const Vec k4 = f(t + step, axpy(y, step, k3));
      for (int cc = 0; cc < dim; ++cc) {
        y[cc] += step / 6.0 * (k1[cc] + 2.0 * k2[cc] + 2.0 * k3[cc] + k4[cc]);
      }
      t += step;
    }
    t = target;
    ys.push_back(y);
  }
  return ys;
}

double rel_deviation(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double dev = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      const double scale = std::max(1.0, std::abs(b[k][i]));
      dev = std::max(dev, std::abs(a[k][i] - b[k][i]) / scale);
    }
  }
  return dev;
}

}  // namespace

QuadratureWeights gamma_weights(const ScalingTables& tables,
                                const BoundaryOperators& ops) {
  const CoifletSpec spec = tables.spec;
  const int m1 = spec.M1;
  const int a1 = ops.alpha1;
  const int a2 = ops.alpha2;

  QuadratureWeights w;
  w.spec = spec;
  w.gamma.assign(std::size_t(a2) + 2, 0.0);
  for (int d = 0; d <= a2 + 1; ++d) {
    long double g = static_cast<long double>(tables.phi_integral(d + m1)) -
                    static_cast<long double>(tables.phi_integral(d + m1 - 1));
    if (d <= a2) {
      // End correction: translates beyond the interval are re-expressed
      // through the boundary operator, which folds their quadrature mass
      // back onto the interior weights.
      for (int l = 1; l <= a1; ++l) {
        long double lambda = 0.0L;
        long double pw = 1.0L;
        for (int i = 0; i < spec.N; ++i) {
          lambda += static_cast<long double>(ops.zeta_b(i, d)) * pw /
                    factorial_ld(i);
          pw *= static_cast<long double>(l);
        }
        g += lambda *
             (static_cast<long double>(tables.phi_integral(m1 - l)) -
              static_cast<long double>(tables.phi_integral(m1 - 1 - l)));
      }
    }
    w.gamma[std::size_t(d)] = static_cast<double>(g);
  }
  return w;
}

std::vector<Vec> taylor_prehistory(const std::vector<Vec>& derivs, double h,
                                   int n_hist) {
  if (derivs.empty()) throw Error("taylor_prehistory: no derivatives given");
  const int dim = int(derivs.front().size());
  std::vector<Vec> pre;
  pre.reserve(n_hist);
  for (int k = 1; k <= n_hist; ++k) {
    Vec y(dim, 0.0);
    const long double x = -static_cast<long double>(k) * h;
    for (std::size_t i = 0; i < derivs.size(); ++i) {
      long double term = 1.0L;
      for (std::size_t p = 0; p < i; ++p) term *= x;
      term /= factorial_ld(int(i));
      for (int cc = 0; cc < dim; ++cc) {
        y[cc] += static_cast<double>(term * derivs[i][cc]);
      }
    }
    pre.push_back(std::move(y));
  }
  return pre;
}

std::vector<Vec> fallback_prehistory(const OdeSystem& system, const Vec& y0,
                                     double h, int n_hist, int n_order,
                                     double* deviation) {
  if (!system.rhs) throw MissingSeeds("fallback seeds require a right-hand side");
  std::vector<double> xs(static_cast<std::size_t>(n_order), 0.0);
  for (int i = 0; i < n_order; ++i) xs[std::size_t(i)] = i * h;

  std::vector<Vec> prev;
  std::vector<Vec> pre;
  double dev = std::numeric_limits<double>::quiet_NaN();
  for (int nsub : {1, 2, 4, 8, 16, 32, 64}) {
    const std::vector<Vec> ys =
        rk4_window(system.rhs, system.t0, y0, h, n_order, nsub);
    const std::vector<Vec> derivs = dd_derivatives(xs, ys, n_order);
    pre = taylor_prehistory(derivs, h, n_hist);
    if (!prev.empty()) {
      dev = rel_deviation(pre, prev);
      if (dev < 1e-13) break;
    }
    prev = pre;
  }
  if (deviation) *deviation = dev;
  return pre;
}

std::vector<Vec> startup_history(const OdeSystem& system, const Vec& y0,
                                 double h, int n_hist, int n_order,
                                 const SolverConfig& config, Trajectory* diag) {
  if (h <= 0.0) throw Error("startup_history: step size must be positive");
  if (n_hist < 0) throw Error("startup_history: negative history length");
  if (n_hist == 0) return {};

  if (system.seed_provider) {
    std::vector<Vec> derivs = system.seed_provider(n_order);
    if (!derivs.empty()) {
      if (int(derivs.size()) > n_order) derivs.resize(std::size_t(n_order));
      return taylor_prehistory(derivs, h, n_hist);
    }
  }
  if (!config.allow_fallback_seeds) {
    throw MissingSeeds(
        "no derivative seeds provided and the numeric fallback is disabled");
  }
  double dev = 0.0;
  std::vector<Vec> pre = fallback_prehistory(system, y0, h, n_hist, n_order, &dev);
  if (diag) {
    diag->fallback_seeds = true;
    diag->seed_deviation = dev;
    diag->seed_warning = dev > std::pow(h, n_order);
  }
  return pre;
}

Vec wtim_step(const OdeSystem& system, const QuadratureWeights& weights,
              const std::vector<Vec>& history, double t_j, double h,
              const SolverConfig& config, StepDiagnostics* diag) {
  const int depth = weights.history_depth();
  if (int(history.size()) != depth) {
    throw Error("wtim_step: history must hold " + std::to_string(depth) +
                " states, got " + std::to_string(history.size()));
  }
  if (!system.rhs) throw Error("wtim_step: system has no right-hand side");
  if (h <= 0.0) throw Error("wtim_step: step size must be positive");

  const std::vector<double>& g = weights.gamma;
  Vec rhs = history.front();
  Vec f_prev;
  for (int l = 1; l <= depth; ++l) {
    const Vec fl = system.rhs(t_j - l * h, history[std::size_t(l - 1)]);
    if (l == 1) f_prev = fl;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      rhs[i] += h * g[std::size_t(l)] * fl[i];
    }
  }
  const Vec z0 = axpy(history.front(), h, f_prev);
  return solve_implicit(system.rhs, system.jacobian, t_j, h * g[0], rhs, z0,
                        config, diag);
}

Trajectory wtim_integrate(const OdeSystem& system,
                          const QuadratureWeights& weights, const Vec& y0,
                          double h, int n_steps, const SolverConfig& config) {
  if (system.dimension < 1) throw Error("wtim_integrate: dimension must be >= 1");
  if (int(y0.size()) != system.dimension) {
    throw Error("wtim_integrate: initial state has wrong dimension");
  }
  if (!system.rhs) throw Error("wtim_integrate: system has no right-hand side");
  if (h <= 0.0) throw Error("wtim_integrate: step size must be positive");
  if (n_steps < 0) throw Error("wtim_integrate: negative step count");

  const std::vector<double>& g = weights.gamma;
  const int depth = weights.history_depth();
  const int n_hist = depth - 1;

  Trajectory traj;
  traj.h = h;
  // Prehistory states y_{-1}..y_{-n_hist} and their right-hand sides; the
  // system must be evaluable back to t0 - depth*h (an out-of-domain time is
  // the system's responsibility to reject).  Analytic seeds are cheap, so
  // ask for twice the scheme order to keep the startup truncation below the
  // marching error; the numeric fallback stays at order N.
  const int n_order =
      system.seed_provider ? 2 * weights.spec.N : weights.spec.N;
  const std::vector<Vec> pre =
      startup_history(system, y0, h, n_hist, n_order, config, &traj);

  std::deque<Vec> fhist;  // oldest..newest: f_{j-depth}..f_{j-1}
  for (int k = n_hist; k >= 1; --k) {
    fhist.push_back(system.rhs(system.t0 - k * h, pre[std::size_t(k - 1)]));
  }
  fhist.push_back(system.rhs(system.t0, y0));

  traj.times.reserve(std::size_t(n_steps) + 1);
  traj.states.reserve(std::size_t(n_steps) + 1);
  traj.diagnostics.reserve(std::size_t(n_steps));
  traj.times.push_back(system.t0);
  traj.states.push_back(y0);

  Vec y = y0;
  for (int j = 1; j <= n_steps; ++j) {
    const double tj = system.t0 + j * h;
    Vec rhs = y;
    for (int l = 1; l <= depth; ++l) {
      const Vec& fl = fhist[fhist.size() - std::size_t(l)];
      for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] += h * g[std::size_t(l)] * fl[i];
      }
    }
    const Vec z0 = axpy(y, h, fhist.back());
    StepDiagnostics d;
    y = solve_implicit(system.rhs, system.jacobian, tj, h * g[0], rhs, z0,
                       config, &d);
    fhist.push_back(system.rhs(tj, y));
    if (int(fhist.size()) > depth) fhist.pop_front();
    traj.times.push_back(tj);
    traj.states.push_back(y);
    traj.diagnostics.push_back(d);
  }
  return traj;
}

Trajectory linear_integrate(const LinearOdeSystem& system,
                            const QuadratureWeights& weights, const Vec& y0,
                            double h, int n_steps, const SolverConfig& config) {
  if (system.dimension < 1) throw Error("linear_integrate: dimension must be >= 1");
  if (int(y0.size()) != system.dimension) {
    throw Error("linear_integrate: initial state has wrong dimension");
  }
  if (!system.a) throw Error("linear_integrate: system has no coefficient matrix");
  if (h <= 0.0) throw Error("linear_integrate: step size must be positive");

  const int n = system.dimension;
  auto q_at = [&](double t) {
    return system.q ? system.q(t) : Vec(std::size_t(n), 0.0);
  };
  auto f_at = [&](double t, const Vec& y) {
    Vec out = matvec(system.a(t), y);
    const Vec qv = q_at(t);
    for (int i = 0; i < n; ++i) out[std::size_t(i)] += qv[std::size_t(i)];
    return out;
  };

  OdeSystem wrapped;
  wrapped.dimension = n;
  wrapped.t0 = system.t0;
  wrapped.rhs = f_at;
  wrapped.seed_provider = system.seed_provider;

  const std::vector<double>& g = weights.gamma;
  const int depth = weights.history_depth();
  const int n_hist = depth - 1;

  Trajectory traj;
  traj.h = h;
  const int n_order =
      wrapped.seed_provider ? 2 * weights.spec.N : weights.spec.N;
  const std::vector<Vec> pre =
      startup_history(wrapped, y0, h, n_hist, n_order, config, &traj);

  std::deque<Vec> fhist;
  for (int k = n_hist; k >= 1; --k) {
    fhist.push_back(f_at(system.t0 - k * h, pre[std::size_t(k - 1)]));
  }
  fhist.push_back(f_at(system.t0, y0));

  traj.times.reserve(std::size_t(n_steps) + 1);
  traj.states.reserve(std::size_t(n_steps) + 1);
  traj.diagnostics.reserve(std::size_t(n_steps));
  traj.times.push_back(system.t0);
  traj.states.push_back(y0);

  Vec y = y0;
  for (int j = 1; j <= n_steps; ++j) {
    const double tj = system.t0 + j * h;
    Vec rhs = y;
    for (int l = 1; l <= depth; ++l) {
      const Vec& fl = fhist[fhist.size() - std::size_t(l)];
      for (std::size_t i = 0; i < rhs.size(); ++i) {
        rhs[i] += h * g[std::size_t(l)] * fl[i];
      }
    }
    // The implicit right-hand side at t_j contributes h Gamma_0 q(t_j) in
    // addition to the state-coupled term folded into the matrix.
    const Vec qj = q_at(tj);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += h * g[0] * qj[i];
    MatD m = MatD::identity(n);
    const MatD a = system.a(tj);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) m(r, c) -= h * g[0] * a(r, c);
    }
    y = solve(m, rhs);

    StepDiagnostics d;
    d.iterations = 1;
    Vec res = matvec(m, y);
    double rn = 0.0;
    for (int i = 0; i < n; ++i) {
      rn = std::max(rn, std::abs(res[std::size_t(i)] - rhs[std::size_t(i)]));
    }
    d.residual = rn;

    fhist.push_back(f_at(tj, y));
    if (int(fhist.size()) > depth) fhist.pop_front();
    traj.times.push_back(tj);
    traj.states.push_back(y);
    traj.diagnostics.push_back(d);
  }
  return traj;
}

}  // namespace wtk
