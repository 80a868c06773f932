#include "wtk/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <utility>

#include "wtk/errors.hpp"
#include "wtk/kernels.hpp"

namespace wtk {

namespace {

// Displacement derivatives at t = 0 for x'' = -w2 x - eta x^3 with x(0) = 1,
// x'(0) = 0: d[i+2] = -w2 d[i] - eta (x^3)^(i), where the i-th derivative of
// the cube at 0 expands through the multinomial theorem over d[0..i].
std::vector<double> displacement_derivatives(double w2, double eta,
                                             int count) {
  std::vector<double> d(static_cast<size_t>(std::max(count, 0)), 0.0);
  if (count > 0) d[0] = 1.0;
  std::vector<double> fact(static_cast<size_t>(std::max(count, 1)), 1.0);
  for (size_t i = 1; i < fact.size(); ++i)
    fact[i] = fact[i - 1] * static_cast<double>(i);
  for (int i = 0; i + 2 < count; ++i) {
    long double cube = 0.0L;
    if (eta != 0.0) {
      for (int a = 0; a <= i; ++a)
        for (int b = 0; a + b <= i; ++b) {
          const int c = i - a - b;
          const double weight =
              fact[size_t(i)] / (fact[size_t(a)] * fact[size_t(b)] * fact[size_t(c)]);
          cube += static_cast<long double>(weight * d[size_t(a)] *
                                           d[size_t(b)] * d[size_t(c)]);
        }
    }
    d[size_t(i) + 2] =
        -w2 * d[size_t(i)] - eta * static_cast<double>(cube);
  }
  return d;
}

// Seeds y^(i)(0) = [x^(i)(0), x^(i+1)(0)] for the first-order form.
std::function<std::vector<Vec>(int)> pair_seed_provider(double w2,
                                                        double eta) {
  return [w2, eta](int count) {
    const std::vector<double> d =
        displacement_derivatives(w2, eta, count + 1);
    std::vector<Vec> out(static_cast<size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i)
      out[size_t(i)] = {d[size_t(i)], d[size_t(i) + 1]};
    return out;
  };
}

PdeProblem burgers_declaration(double re, int variant) {
  PdeProblem p;
  p.fields = 1;
  p.linear_terms = {{0, 0, 2, 1.0 / re}};
  p.nl_target = 0;
  p.nl_order = 1;
  p.nl_coeff = -0.5;
  p.nl_map = [](const std::vector<double>& u, double, double) {
    return u[0] * u[0];
  };
  p.nl_dmap = [](const std::vector<double>& u, double, double, int) {
    return 2.0 * u[0];
  };
  p.bc_left = {{0}};
  p.bc_right = {{0}};
  const double pi = std::numbers::pi;
  switch (variant) {
    case 0:
      p.initial = {[re](double x) { return burgers_reference('a', re, x, 0.0); }};
      break;
    case 1:
      p.initial = {[pi](double x) { return std::sin(pi * x); }};
      break;
    default:
      p.initial = {[pi](double x) { return std::sin(2.0 * pi * x); }};
      break;
  }
  return p;
}

PdeProblem klein_gordon_declaration() {
  PdeProblem p;
  p.fields = 2;
  p.linear_terms = {{0, 1, 0, 1.0}, {1, 0, 2, 1.0}};
  p.nl_target = 1;
  p.nl_order = 0;
  p.nl_coeff = -1.0;
  p.nl_map = [](const std::vector<double>& u, double, double) {
    return u[0] * u[0];
  };
  p.nl_dmap = [](const std::vector<double>& u, double, double, int f) {
    return f == 0 ? 2.0 * u[0] : 0.0;
  };
  p.forcing = {{}, [](double x, double t) {
                 const double x3 = x * x * x, t3 = t * t * t;
                 return 6.0 * x * t * (x * x - t * t) + x3 * x3 * t3 * t3;
               }};
  p.bc_left = {{0}, {0}};
  p.bc_right = {{0}, {0}};
  p.dirichlet.resize(2);
  p.dirichlet[0].g1 = [](double t) { return t * t * t; };
  p.dirichlet[0].g1_dt = [](double t) { return 3.0 * t * t; };
  p.dirichlet[1].g1 = [](double t) { return 3.0 * t * t; };
  p.dirichlet[1].g1_dt = [](double t) { return 6.0 * t; };
  return p;
}

void require_positive(const std::map<std::string, double>& p,
                      const char* key) {
  const auto it = p.find(key);
  if (it != p.end() && !(it->second > 0.0))
    throw Error(std::string("make_problem: parameter '") + key +
                "' must be positive");
}

int integer_parameter(const std::map<std::string, double>& p, const char* key) {
  const double v = p.at(key);
  if (!(v > 0.0) || std::floor(v) != v || v > 1e6)
    throw Error(std::string("make_problem: parameter '") + key +
                "' must be a positive integer");
  return static_cast<int>(v);
}

// Max nodal error of the final state against the benchmark reference,
// including the boundary lifting for constrained problems.
double nodal_error(const Benchmark& b, const SemiDiscreteSystem& sys,
                   const Vec& state, double t) {
  double err = 0.0;
  for (int k = 0; k < sys.node_count(); ++k) {
    const double x = sys.nodes[size_t(k)];
    double u = state[size_t(k)];
    if (sys.lifted.active) u += sys.lifted.lift(0, x, t);
    err = std::max(err, std::abs(u - b.reference(x, t)));
  }
  return err;
}

long long step_count(double t_probe, double h) {
  if (!(h > 0.0)) throw Error("benchmark run: step size must be positive");
  if (!(t_probe > 0.0))
    throw Error("benchmark run: probe time must be positive");
  const double ratio = t_probe / h;
  const long long steps = std::llround(ratio);
  if (steps < 1 ||
      std::abs(ratio - static_cast<double>(steps)) >
          1e-9 * std::max(1.0, ratio))
    throw Error("benchmark run: probe time is not an integer number of steps");
  return steps;
}

}  // namespace

double bessel_i(int nu, double x) {
  if (nu < 0) throw Error("bessel_i: order must be nonnegative");
  const long double half = 0.5L * static_cast<long double>(x);
  long double term = 1.0L;
  for (int i = 1; i <= nu; ++i) term *= half / i;
  long double sum = term;
  const long double q = half * half;
  for (int m = 1; m <= 1000; ++m) {
    term *= q / (static_cast<long double>(m) * (m + nu));
    sum += term;
    if (!std::isfinite(static_cast<double>(sum)))
      throw SeriesNotConverged("bessel_i: series overflowed");
    if (fabsl(term) <= 1e-20L * fabsl(sum)) return static_cast<double>(sum);
  }
  throw SeriesNotConverged("bessel_i: power series did not converge");
}

namespace {

struct AgmScale {
  long double a[40];
  long double c[40];
  int depth = 0;
};

AgmScale agm_descend(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw ModulusOutOfRange("jacobi_cn: modulus must lie in [0, 1)");
  AgmScale s;
  long double a = 1.0L;
  long double b = sqrtl((1.0L - k) * (1.0L + k));
  s.a[0] = a;
  s.c[0] = k;
  int m = 0;
  while (m < 38) {
    const long double an = 0.5L * (a + b);
    const long double cn = 0.5L * (a - b);
    b = sqrtl(a * b);
    a = an;
    ++m;
    s.a[m] = a;
    s.c[m] = cn;
    if (fabsl(cn) <= 1e-17L) break;
  }
  s.depth = m;
  return s;
}

}  // namespace

double elliptic_k(double k) {
  const AgmScale s = agm_descend(k);
  return static_cast<double>(std::numbers::pi_v<long double> /
                             (2.0L * s.a[s.depth]));
}

double jacobi_cn(double u, double k) {
  const AgmScale s = agm_descend(k);
  if (k == 0.0) return std::cos(u);
  long double phi = ldexpl(s.a[s.depth] * static_cast<long double>(u),
                           s.depth);
  for (int i = s.depth; i >= 1; --i)
    phi = 0.5L * (phi + asinl(s.c[i] * sinl(phi) / s.a[i]));
  return static_cast<double>(cosl(phi));
}

double burgers_reference(char case_id, double re, double x, double t) {
  if (!(re > 0.0)) throw Error("burgers_reference: re must be positive");
  if (t < 0.0) throw Error("burgers_reference: t must be nonnegative");
  const double pi = std::numbers::pi;
  if (case_id == 'a') {
    const double decay = std::exp(-pi * pi * t / re);
    return 2.0 * pi / re * decay * std::sin(pi * x) /
           (100.0 + decay * std::cos(pi * x));
  }
  if (case_id != 'b')
    throw Error("burgers_reference: case must be 'a' or 'b'");
  // Fourier form of the linearizing substitution: the initial potential
  // exp(-(1 - cos pi x) z / ...) expands in I_n(z) with z = re / (2 pi), and
  // every mode decays by its own heat factor.
  const double z = re / (2.0 * pi);
  long double num = 0.0L;
  long double den = static_cast<long double>(bessel_i(0, z));
  int quiet = 0;
  bool converged = false;
  for (int n = 1; n <= 400; ++n) {
    const long double coeff = 2.0L * static_cast<long double>(bessel_i(n, z));
    const long double mode =
        coeff * expl(-static_cast<long double>(n) * n * pi * pi * t / re);
    num += mode * n * sinl(n * pi * static_cast<long double>(x));
    den += mode * cosl(n * pi * static_cast<long double>(x));
    if (fabsl(mode) * (n + 1) <= 1e-13L * fabsl(den)) {
      if (++quiet >= 2) {
        converged = true;
        break;
      }
    } else {
      quiet = 0;
    }
  }
  if (!converged)
    throw SeriesNotConverged(
        "burgers_reference: case-b series did not reach its tail target");
  const double u = static_cast<double>(2.0L * pi / re * num / den);
  if (!std::isfinite(u))
    throw SeriesNotConverged("burgers_reference: case-b series overflowed");
  return u;
}

Benchmark make_problem(const std::string& name,
                       const std::map<std::string, double>& overrides) {
  const double pi = std::numbers::pi;
  std::map<std::string, double> p{{"N", 6.0}, {"M1", 7.0}};
  if (name == "oscillator") {
    p.insert({{"xi", 4.0 * pi * pi}, {"h", 0.125}, {"t_end", 4.0}});
  } else if (name == "duffing") {
    p.insert({{"omega_n", 1.0}, {"eta", 10.0}, {"h", 1.0 / 32}, {"t_end", 1.0}});
  } else if (name == "burgers_a") {
    p.insert({{"re", 200.0}, {"n", 4.0}, {"h", 1.0 / 64}, {"t_end", 1.0}});
  } else if (name == "burgers_b") {
    p.insert({{"re", 10.0}, {"n", 4.0}, {"h", 1.0 / 256}, {"t_end", 1.0}});
  } else if (name == "burgers_shock") {
    p.insert({{"re", 100.0}, {"n", 6.0}, {"h", 1.0 / 256}, {"t_end", 1.0}});
  } else if (name == "klein_gordon") {
    p.insert({{"n", 4.0}, {"h", 1.0 / 16}, {"t_end", 5.0}});
  } else {
    throw UnknownBenchmark("make_problem: unknown benchmark '" + name + "'");
  }
  for (const auto& [key, value] : overrides) {
    const auto it = p.find(key);
    if (it == p.end())
      throw Error("make_problem: benchmark '" + name +
                  "' has no parameter '" + key + "'");
    it->second = value;
  }
  for (const char* key : {"xi", "omega_n", "re", "h", "t_end"})
    require_positive(p, key);
  if (p.count("eta") && p.at("eta") < 0.0)
    throw Error("make_problem: parameter 'eta' must be nonnegative");

  Benchmark b;
  b.name = name;
  b.spec = CoifletSpec{integer_parameter(p, "N"), integer_parameter(p, "M1")};
  b.h = p.at("h");
  b.t_end = p.at("t_end");

  if (name == "oscillator") {
    const double xi = p.at("xi");
    b.ode.dimension = 2;
    b.ode.rhs = [xi](double, const Vec& y) {
      return Vec{y[1], -xi * y[0]};
    };
    b.ode.jacobian = [xi](double, const Vec&) {
      MatD j(2, 2);
      j(0, 1) = 1.0;
      j(1, 0) = -xi;
      return j;
    };
    b.ode.seed_provider = pair_seed_provider(xi, 0.0);
    b.y0 = {1.0, 0.0};
    b.reference = [xi](double, double t) { return std::cos(std::sqrt(xi) * t); };
  } else if (name == "duffing") {
    const double wn = p.at("omega_n");
    const double eta = p.at("eta");
    const double w2 = wn * wn;
    b.ode.dimension = 2;
    b.ode.rhs = [w2, eta](double, const Vec& y) {
      return Vec{y[1], -w2 * y[0] - eta * y[0] * y[0] * y[0]};
    };
    b.ode.jacobian = [w2, eta](double, const Vec& y) {
      MatD j(2, 2);
      j(0, 1) = 1.0;
      j(1, 0) = -w2 - 3.0 * eta * y[0] * y[0];
      return j;
    };
    b.ode.seed_provider = pair_seed_provider(w2, eta);
    b.y0 = {1.0, 0.0};
    b.reference = [w2, eta](double, double t) {
      const double om = std::sqrt(w2 + eta);
      const double k = std::sqrt(eta / (2.0 * (w2 + eta)));
      return jacobi_cn(om * t, k);
    };
  } else if (name == "burgers_a" || name == "burgers_b" ||
             name == "burgers_shock") {
    const double re = p.at("re");
    const int variant = name == "burgers_a" ? 0 : (name == "burgers_b" ? 1 : 2);
    b.is_pde = true;
    b.n = integer_parameter(p, "n");
    b.pde = burgers_declaration(re, variant);
    if (variant == 0)
      b.reference = [re](double x, double t) {
        return burgers_reference('a', re, x, t);
      };
    else if (variant == 1)
      b.reference = [re](double x, double t) {
        return burgers_reference('b', re, x, t);
      };
  } else {
    b.is_pde = true;
    b.n = integer_parameter(p, "n");
    b.pde = klein_gordon_declaration();
    b.reference = [](double x, double t) {
      const double x3 = x * x * x, t3 = t * t * t;
      return x3 * t3;
    };
  }
  b.parameters = std::move(p);
  return b;
}

WaveletMachinery build_machinery(const CoifletSpec& spec) {
  FilterBank bank = solve_filter_coefficients(spec);
  ScalingTables tables = build_scaling_tables(bank);
  BoundaryOperators ops = build_boundary_operators(tables);
  QuadratureWeights weights = gamma_weights(tables, ops);
  return WaveletMachinery{std::move(bank), std::move(tables), std::move(ops),
                          std::move(weights)};
}

RunResult run_benchmark(const Benchmark& b, const WaveletMachinery& m,
                        double h, double t_probe, const SolverConfig& config) {
  const long long steps = step_count(t_probe, h);
  RunResult out;
  if (!b.is_pde) {
    out.trajectory = wtim_integrate(b.ode, m.weights, b.y0, h,
                                    static_cast<int>(steps), config);
    out.final_field.assign(out.trajectory.states.back().begin(),
                           out.trajectory.states.back().end());
    if (b.reference) {
      out.max_error = std::abs(out.final_field[0] -
                               b.reference(0.0, out.trajectory.times.back()));
      out.has_error = true;
    }
    return out;
  }
  const GalerkinBases bases = build_bases(m.bank, m.tables, m.ops, b.n, b.pde);
  auto sys = std::make_shared<const SemiDiscreteSystem>(assemble(b.pde, bases));
  out.checksum_before = sys->matrix_checksum();
  OdeSystem ode = semi_discretize(sys);
  out.trajectory = wtim_integrate(ode, m.weights, sys->g, h,
                                  static_cast<int>(steps), config);
  out.checksum_after = sys->matrix_checksum();
  out.nodes = sys->nodes;
  const double tf = out.trajectory.times.back();
  const Vec& yf = out.trajectory.states.back();
  const int nn = sys->node_count();
  out.final_field.resize(static_cast<size_t>(nn));
  for (int k = 0; k < nn; ++k) {
    double u = yf[size_t(k)];
    if (sys->lifted.active) u += sys->lifted.lift(0, sys->nodes[size_t(k)], tf);
    out.final_field[size_t(k)] = u;
  }
  if (b.reference) {
    out.max_error = nodal_error(b, *sys, yf, tf);
    out.has_error = true;
  }
  return out;
}

ErrorStudy convergence_study(const Benchmark& b,
                             const std::vector<double>& h_list, double t_probe,
                             bool parallel) {
  if (h_list.size() < 3)
    throw Error("convergence_study: need at least 3 step sizes");
  if (!(t_probe > 0.0))
    throw Error("convergence_study: probe time must be positive");
  if (!b.reference)
    throw Error("convergence_study: benchmark '" + b.name +
                "' has no reference solution");
  const WaveletMachinery m = build_machinery(b.spec);

  // One spatial assembly shared read-only across the sweep.
  std::shared_ptr<const SemiDiscreteSystem> sys;
  OdeSystem ode;
  Vec y0;
  if (b.is_pde) {
    const GalerkinBases bases =
        build_bases(m.bank, m.tables, m.ops, b.n, b.pde);
    sys = std::make_shared<const SemiDiscreteSystem>(assemble(b.pde, bases));
    ode = semi_discretize(sys);
    y0 = sys->g;
  } else {
    ode = b.ode;
    y0 = b.y0;
  }

  const int count = static_cast<int>(h_list.size());
  ErrorStudy study;
  study.h = h_list;
  study.errors.assign(static_cast<size_t>(count),
                      std::numeric_limits<double>::quiet_NaN());
  study.diagnostics.assign(static_cast<size_t>(count), "");
  auto run_one = [&](int i) {
    try {
      const double h = h_list[size_t(i)];
      const long long steps = step_count(t_probe, h);
      const Trajectory traj =
          wtim_integrate(ode, m.weights, y0, h, static_cast<int>(steps));
      study.errors[size_t(i)] =
          b.is_pde ? nodal_error(b, *sys, traj.states.back(),
                                 traj.times.back())
                   : std::abs(traj.states.back()[0] -
                              b.reference(0.0, traj.times.back()));
    } catch (const std::exception& ex) {
      study.diagnostics[size_t(i)] = ex.what();
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) run_one(i);
  } else {
    for (int i = 0; i < count; ++i) run_one(i);
  }

  std::vector<double> lx, ly;
  for (int i = 0; i < count; ++i) {
    const double e = study.errors[size_t(i)];
    if (std::isfinite(e) && e > 0.0) {
      lx.push_back(std::log(h_list[size_t(i)]));
      ly.push_back(std::log(e));
    }
  }
  study.fitted_points = static_cast<int>(lx.size());
  study.slope = lx.size() >= 2 ? fit_slope(lx, ly)
                               : std::numeric_limits<double>::quiet_NaN();
  return study;
}

}  // namespace wtk
