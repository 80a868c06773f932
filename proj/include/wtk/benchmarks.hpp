#pragma once

// Benchmark problems with independently validated reference solutions: the
// free single oscillator, the unforced Duffing oscillator (Jacobi elliptic
// cosine reference), viscous Burgers flows (closed-form and Fourier-Bessel
// references), and a forced Klein-Gordon system, plus convergence-study
// drivers that sweep step sizes through the full pipeline.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wtk/galerkin.hpp"
#include "wtk/integrator.hpp"

namespace wtk {

// Modified Bessel function of the first kind, integer order nu >= 0, by the
// ascending power series with relative tail 1e-20.
double bessel_i(int nu, double x);

// Complete elliptic integral K(k) by the arithmetic-geometric mean.
// Requires 0 <= k < 1; throws ModulusOutOfRange otherwise.
double elliptic_k(double k);

// Jacobi elliptic cosine cn(u; k) by the descending-Landen AGM recursion with
// backward amplitude substitution. Requires 0 <= k < 1 (ModulusOutOfRange).
double jacobi_cn(double u, double k);

// Reference solutions of u_t + (u^2/2)_x = u_xx / re on (0,1) with
// homogeneous end values.
//   case 'a': closed form for u(x,0) = 2 pi sin(pi x) / (re (100 + cos pi x))
//   case 'b': Fourier series with modified-Bessel coefficients for
//             u(x,0) = sin(pi x), truncated adaptively (tail below 1e-12)
// Throws Error for an unknown case or t < 0, SeriesNotConverged when the
// series cannot reach its tail target.
double burgers_reference(char case_id, double re, double x, double t);

// A configured benchmark: either a first-order ODE system ready for the
// implicit march, or a PDE declaration ready for spatial assembly.
struct Benchmark {
  std::string name;
  std::map<std::string, double> parameters;
  CoifletSpec spec{6, 7};
  double h = 0.0;      // default step size
  double t_end = 0.0;  // default run window
  // Exact solution u(x, t); the spatial argument is ignored for ODE problems.
  // Empty for the qualitative shock case.
  std::function<double(double, double)> reference;

  bool is_pde = false;
  // ODE problems: first-order system with exact derivative seeds.
  OdeSystem ode;
  Vec y0;
  // PDE problems: declaration plus spatial resolution level.
  PdeProblem pde;
  int n = 0;
};

// Configure one of {oscillator, duffing, burgers_a, burgers_b, burgers_shock,
// klein_gordon} with its default parameters, applying numeric overrides
// (recognized keys: xi, omega_n, eta, re, n, h, t_end as applicable).
// Throws UnknownBenchmark for an unrecognized name, Error for an unknown
// override key or an unphysical value.
Benchmark make_problem(const std::string& name,
                       const std::map<std::string, double>& overrides = {});

// Shared wavelet machinery for a filter specification, built once per sweep.
struct WaveletMachinery {
  FilterBank bank;
  ScalingTables tables;
  BoundaryOperators ops;
  QuadratureWeights weights;
};

WaveletMachinery build_machinery(const CoifletSpec& spec);

struct RunResult {
  Trajectory trajectory;
  std::vector<double> nodes;        // PDE nodal coordinates (empty for ODEs)
  std::vector<double> final_field;  // solution values at the probe time
  double max_error = 0.0;           // max nodal error vs the reference
  bool has_error = false;           // false when no reference is available
  std::uint64_t checksum_before = 0;  // PDE decoupling checksums
  std::uint64_t checksum_after = 0;
};

// Run the full pipeline to the probe time (which must be an integer number of
// steps away from 0). PDE problems assemble at the benchmark's resolution
// level, march, and report the max nodal error of the reconstructed solution;
// ODE problems march directly and report the displacement error.
RunResult run_benchmark(const Benchmark& b, const WaveletMachinery& m,
                        double h, double t_probe,
                        const SolverConfig& config = {});

struct ErrorStudy {
  std::vector<double> h;                  // step sizes, as given
  std::vector<double> errors;             // max error per run; NaN on failure
  std::vector<std::string> diagnostics;   // failure messages, empty when ok
  double slope = 0.0;                     // log-log least-squares fit
  int fitted_points = 0;                  // runs that produced usable errors
};

// Sweep the benchmark over step sizes and fit the log-log error slope at the
// probe time. Failures are recorded per point and the study continues.
// Requires at least 3 step sizes. Spatial assembly is shared across runs;
// the runs themselves execute independently (in parallel when requested).
ErrorStudy convergence_study(const Benchmark& b,
                             const std::vector<double>& h_list, double t_probe,
                             bool parallel = true);

}  // namespace wtk
