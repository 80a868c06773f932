#pragma once

// Single-step implicit time integration with scaling-function quadrature
// weights: the update couples the unknown state to alpha2+1 prior right-hand
// side values through the Gamma weights, giving order-N accuracy with a
// one-dimensional implicit solve structure per step.

#include <functional>
#include <vector>

#include "wtk/interval.hpp"

namespace wtk {

using Vec = std::vector<double>;

struct QuadratureWeights {
  CoifletSpec spec;
  std::vector<double> gamma;  // Gamma_0..Gamma_{alpha2+1}

  // Number of history terms l = 1..alpha2+1 in the step formula.
  int history_depth() const { return int(gamma.size()) - 1; }
};

// Gamma_d = phi_int(d+M1) - phi_int(d+M1-1), plus, for d <= alpha2, the
// right-boundary correction sum_{l=1}^{alpha1} Lambda_{d,l} [phi_int(M1-l) -
// phi_int(M1-1-l)] with Lambda_{d,l} = sum_i zeta_b[i][d] l^i / i!.  The
// level factors cancel, so the weights are resolution-free.
QuadratureWeights gamma_weights(const ScalingTables& tables,
                                const BoundaryOperators& ops);

struct OdeSystem {
  int dimension = 0;
  double t0 = 0.0;
  // f(t, y); must be evaluable down to t0 - (alpha2+1) h for the startup
  // history.
  std::function<Vec(double, const Vec&)> rhs;
  // Optional analytic Jacobian df/dy; forward differences otherwise.
  std::function<MatD(double, const Vec&)> jacobian;
  // Optional exact derivative seeds: returns y^(i)(t0) for i = 0..count-1.
  std::function<std::vector<Vec>(int count)> seed_provider;
};

// Linear form y' = A(t) y + q(t).
struct LinearOdeSystem {
  int dimension = 0;
  double t0 = 0.0;
  std::function<MatD(double)> a;
  std::function<Vec(double)> q;  // empty means q = 0
  std::function<std::vector<Vec>(int count)> seed_provider;
};

struct SolverConfig {
  double rtol = 1e-12;
  double atol = 1e-14;
  int max_iterations = 50;
  bool fixed_point = false;  // damped Newton by default
  bool allow_fallback_seeds = true;
};

struct StepDiagnostics {
  int iterations = 0;
  double residual = 0.0;
};

struct Trajectory {
  double h = 0.0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<StepDiagnostics> diagnostics;  // per accepted step
  bool fallback_seeds = false;
  double seed_deviation = 0.0;  // stabilization residual of fallback seeds
  bool seed_warning = false;    // deviation above the h^N accuracy scale
};

// Taylor prehistory y_{-k} = sum_i derivs[i] (-k h)^i / i!, k = 1..n_hist.
std::vector<Vec> taylor_prehistory(const std::vector<Vec>& derivs, double h,
                                   int n_hist);

// Numeric seed fallback: a classical one-step reference integration over the
// first n_order nodes, divided differences for the derivatives, then Taylor
// prehistory; substeps are refined until the prehistory stabilizes.
std::vector<Vec> fallback_prehistory(const OdeSystem& system, const Vec& y0,
                                     double h, int n_hist, int n_order,
                                     double* deviation = nullptr);

// Prehistory y_{-1}..y_{-n_hist} from exact seeds when the system provides
// them, else the numeric fallback (unless disabled).
// Throws MissingSeeds when no source is available, Error for h <= 0.
std::vector<Vec> startup_history(const OdeSystem& system, const Vec& y0,
                                 double h, int n_hist, int n_order,
                                 const SolverConfig& config = {},
                                 Trajectory* diag = nullptr);

// One implicit step: solve
//   y_j - h Gamma_0 f(t_j, y_j) = y_{j-1} + sum_l h Gamma_l f(t_j - l h, ...)
// given the state history ordered newest first: history[0] = y_{j-1},
// history[l-1] = y_{j-l}, with history_depth() entries.
// Throws NewtonDivergence / SingularIteration.
Vec wtim_step(const OdeSystem& system, const QuadratureWeights& weights,
              const std::vector<Vec>& history, double t_j, double h,
              const SolverConfig& config = {},
              StepDiagnostics* diag = nullptr);

// Full march: startup, then n_steps implicit steps with the right-hand-side
// history accumulated once per step.
Trajectory wtim_integrate(const OdeSystem& system,
                          const QuadratureWeights& weights, const Vec& y0,
                          double h, int n_steps,
                          const SolverConfig& config = {});

// Linear path: one dense solve per step,
//   y_j = [I - h Gamma_0 A(t_j)]^-1 (y_{j-1} + sum_l h Gamma_l (A y + q)_{j-l}).
Trajectory linear_integrate(const LinearOdeSystem& system,
                            const QuadratureWeights& weights, const Vec& y0,
                            double h, int n_steps,
                            const SolverConfig& config = {});

}  // namespace wtk
