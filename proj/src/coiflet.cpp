#include "wtk/coiflet.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "filter_seeds.hpp"
#include "wtk/kernels.hpp"

namespace wtk {

namespace {

using LD = long double;

LD pow_int(LD base, int e) {
  LD r = 1.0L;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Row scales for the two moment families keep the residual vector balanced:
// high powers of the support width would otherwise dwarf the quadratic rows.
std::vector<LD> row_scales(const CoifletSpec& spec) {
  const int L = spec.filter_length();
  std::vector<LD> s;
  for (int k = 0; k < spec.N; ++k)
    s.push_back(std::max(1.0L, pow_int(LD(L - 1), k)));
  for (int i = 1; i <= spec.N / 2; ++i)
    s.push_back(pow_int(LD(L - 1), 2 * i - 1));
  return s;
}

// Scaled residual vector of the full constraint system; 3N+1 equations:
//   [0]                  sum p_k - 2
//   [1 .. 3N/2]          sum_i p_i p_{i-2k} - 2 delta_k,   k = 0..3N/2-1
//   [.. +N]              sum_j (-1)^j j^k p_j / s_k,       k = 0..N-1
//   [.. +N/2]            (sum_j j^{2i-1} p_j - 2 M1^{2i-1}) / s_{N+i-1}
std::vector<LD> constraint_residuals(const std::vector<LD>& p,
                                     const CoifletSpec& spec,
                                     const std::vector<LD>& scale) {
  const int L = spec.filter_length();
  std::vector<LD> r;
  LD sum = 0.0L;
  for (const LD& x : p) sum += x;
  r.push_back(sum - 2.0L);
  for (int k = 0; k < 3 * spec.N / 2; ++k) {
    LD s = 0.0L;
    for (int i = 0; i < L; ++i) {
      const int m = i - 2 * k;
      if (m >= 0 && m < L) s += p[i] * p[m];
    }
    r.push_back(s - (k == 0 ? 2.0L : 0.0L));
  }
  for (int k = 0; k < spec.N; ++k) {
    LD s = 0.0L;
    for (int j = 0; j < L; ++j)
      s += (j % 2 ? -1.0L : 1.0L) * pow_int(LD(j), k) * p[j];
    r.push_back(s / scale[k]);
  }
  for (int i = 1; i <= spec.N / 2; ++i) {
    LD s = 0.0L;
    for (int j = 0; j < L; ++j) s += pow_int(LD(j), 2 * i - 1) * p[j];
    r.push_back((s - 2.0L * pow_int(LD(spec.M1), 2 * i - 1)) /
                scale[spec.N + i - 1]);
  }
  return r;
}

Mat<LD> constraint_jacobian(const std::vector<LD>& p, const CoifletSpec& spec,
                            const std::vector<LD>& scale) {
  const int L = spec.filter_length();
  const int nr = 1 + 3 * spec.N / 2 + spec.N + spec.N / 2;
  Mat<LD> jac(nr, L);
  int row = 0;
  for (int c = 0; c < L; ++c) jac(row, c) = 1.0L;
  ++row;
  for (int k = 0; k < 3 * spec.N / 2; ++k, ++row)
    for (int c = 0; c < L; ++c) {
      if (c - 2 * k >= 0 && c - 2 * k < L) jac(row, c) += p[c - 2 * k];
      if (c + 2 * k >= 0 && c + 2 * k < L) jac(row, c) += p[c + 2 * k];
    }
  for (int k = 0; k < spec.N; ++k, ++row)
    for (int c = 0; c < L; ++c)
      jac(row, c) = (c % 2 ? -1.0L : 1.0L) * pow_int(LD(c), k) / scale[k];
  for (int i = 1; i <= spec.N / 2; ++i, ++row)
    for (int c = 0; c < L; ++c)
      jac(row, c) = pow_int(LD(c), 2 * i - 1) / scale[spec.N + i - 1];
  return jac;
}

LD max_abs(const std::vector<LD>& v) {
  LD m = 0.0L;
  for (const LD& x : v) m = std::max(m, std::abs(x));
  return m;
}

// Refinement matrix restricted to the interior integers 1..3N-2.
Mat<LD> refinement_matrix(const FilterBank& bank) {
  const int L = bank.spec.filter_length();
  const int n = L - 2;
  Mat<LD> t(n, n);
  for (int i = 1; i <= L - 2; ++i)
    for (int j = 1; j <= L - 2; ++j) {
      const int k = 2 * i - j;
      if (k >= 0 && k < L) t(i - 1, j - 1) = bank.p[k];
    }
  return t;
}

std::vector<LD> integer_values_ld(const FilterBank& bank, int d) {
  const CoifletSpec& spec = bank.spec;
  const int L = spec.filter_length();
  const int n = L - 2;
  const Mat<LD> t = refinement_matrix(bank);
  const LD lambda = pow_int(0.5L, d);
  std::vector<LD> v = eigenvector_for<LD>(t, lambda, 1e-10L, true);

  // Normalize so the basis reproduces monomials: sum_j (M1-j)^d v_j = d!.
  // For d > 0 the raw monomial (M1-j)^d is ill-conditioned against the
  // eigenvector, so project onto the minimal-l2 monic degree-d polynomial
  // f(y) = y^d + sum_i a_i y^i instead; its d-th derivative is still d!.
  std::vector<LD> y(n);
  for (int j = 1; j <= n; ++j) y[j - 1] = LD(spec.M1) - LD(j);
  LD s = 0.0L;
  if (d == 0) {
    for (const LD& x : v) s += x;
  } else {
    Mat<LD> vm(d, d);
    std::vector<LD> b(d, 0.0L);
    for (int i = 0; i < d; ++i) {
      for (int c = 0; c < d; ++c) {
        LD acc = 0.0L;
        for (int j = 0; j < n; ++j) acc += pow_int(y[j], i + c);
        vm(i, c) = acc;
      }
      LD acc = 0.0L;
      for (int j = 0; j < n; ++j) acc += pow_int(y[j], i + d);
      b[i] = -acc;
    }
    const std::vector<LD> a = solve(vm, b);
    for (int j = 0; j < n; ++j) {
      LD fy = pow_int(y[j], d);
      for (int i = 0; i < d; ++i) fy += a[i] * pow_int(y[j], i);
      s += fy * v[j];
    }
  }
  const LD g = (d == 0 ? 1.0L : factorial_ld(d)) / s;
  std::vector<LD> out(L, 0.0L);
  for (int j = 0; j < n; ++j) out[j + 1] = v[j] * g;
  return out;
}

std::vector<LD> integral_values_ld(const FilterBank& bank) {
  const int L = bank.spec.filter_length();
  const int n = L - 2;
  Mat<LD> a = Mat<LD>::identity(n);
  std::vector<LD> rhs(n, 0.0L);
  for (int k = 1; k <= L - 2; ++k)
    for (int l = 0; l < L; ++l) {
      const int m = 2 * k - l;
      if (m >= 1 && m <= L - 2)
        a(k - 1, m - 1) -= 0.5L * bank.p[l];
      else if (m >= L - 1)
        rhs[k - 1] += 0.5L * bank.p[l];
    }
  const std::vector<LD> u = solve(a, rhs);
  std::vector<LD> out(L, 0.0L);
  for (int i = 0; i < n; ++i) out[i + 1] = u[i];
  out[L - 1] = 1.0L;
  return out;
}

std::vector<LD> cascade_ld(const FilterBank& bank, int d, int levels) {
  const int L = bank.spec.support_end();  // 3N-1 support intervals
  std::vector<LD> w = integer_values_ld(bank, d);
  for (int j = 1; j <= levels; ++j) {
    const long coarse = L * (1L << (j - 1));
    std::vector<LD> wn(L * (1L << j) + 1, 0.0L);
    for (long i = 0; i <= coarse; ++i) wn[2 * i] = w[i];
    const LD twod = pow_int(2.0L, d);
    for (long i = 1; i < L * (1L << j); i += 2) {
      LD s = 0.0L;
      for (int k = 0; k < bank.spec.filter_length(); ++k) {
        const long idx = i - k * (1L << (j - 1));
        if (idx >= 0 && idx <= coarse) s += bank.p[k] * w[idx];
      }
      wn[i] = twod * s;
    }
    w = std::move(wn);
  }
  return w;
}

}  // namespace

void CoifletSpec::validate() const {
  if (N < 2 || N % 2 != 0)
    throw UnsupportedSpec("CoifletSpec: N must be a positive even integer");
  if (M1 < 1 || M1 > 3 * N - 2)
    throw UnsupportedSpec(
        "CoifletSpec: M1 must lie strictly inside the support [0, 3N-1]");
}

FilterBank solve_filter_coefficients(const CoifletSpec& spec,
                                     const std::vector<long double>* guess) {
  spec.validate();
  const int L = spec.filter_length();
  std::vector<LD> p;
  if (guess) {
    if (int(guess->size()) != L)
      throw UnsupportedSpec("solve_filter_coefficients: guess length != 3N");
    p = *guess;
  } else if (spec.N == 6 && spec.M1 == 7) {
    p.assign(std::begin(seeds::kSeedP6), std::end(seeds::kSeedP6));
  } else if (spec.N == 4 && spec.M1 == 7) {
    p.assign(std::begin(seeds::kSeedP4), std::end(seeds::kSeedP4));
  } else {
    throw UnsupportedSpec(
        "solve_filter_coefficients: no built-in guess for this (N, M1); "
        "supply one");
  }

  const std::vector<LD> scale = row_scales(spec);
  // Damped Gauss-Newton with a tiny Tikhonov floor; the system is 3N+1
  // equations in 3N unknowns (one orthogonality row is dependent at the
  // solution), so the normal equations are the right formulation.
  for (int it = 0; it < 20; ++it) {
    const std::vector<LD> r = constraint_residuals(p, spec, scale);
    if (max_abs(r) < 1e-18L) break;
    const Mat<LD> jac = constraint_jacobian(p, spec, scale);
    const int nr = jac.rows();
    Mat<LD> jtj(L, L);
    std::vector<LD> jtr(L, 0.0L);
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        LD s = 0.0L;
        for (int k = 0; k < nr; ++k) s += jac(k, a) * jac(k, b);
        jtj(a, b) = s;
      }
      LD s = 0.0L;
      for (int k = 0; k < nr; ++k) s += jac(k, a) * r[k];
      jtr[a] = s;
    }
    LD tr = 0.0L;
    for (int a = 0; a < L; ++a) tr += jtj(a, a);
    const LD lam = 1e-28L * tr / LD(L);
    for (int a = 0; a < L; ++a) jtj(a, a) += lam;
    const std::vector<LD> step = solve(jtj, jtr);
    for (int a = 0; a < L; ++a) p[a] -= step[a];
  }

  FilterBank bank{spec, p, 0.0};
  bank.residual_norm =
      double(max_abs(constraint_residuals(p, spec, scale)));
  if (!(bank.residual_norm <= 1e-12))
    throw NoConvergence("solve_filter_coefficients: residual " +
                        std::to_string(bank.residual_norm) +
                        " above 1e-12 after iteration cap");
  return bank;
}

std::vector<double> integer_values(const FilterBank& bank, int d) {
  if (d < 0) throw Error("integer_values: negative derivative order");
  const std::vector<LD> v = integer_values_ld(bank, d);
  return std::vector<double>(v.begin(), v.end());
}

std::vector<double> integral_integer_values(const FilterBank& bank) {
  const std::vector<LD> v = integral_values_ld(bank);
  return std::vector<double>(v.begin(), v.end());
}

std::vector<double> moments(const FilterBank& bank, int n_max) {
  const int L = bank.spec.filter_length();
  std::vector<LD> mu(n_max + 1, 0.0L);
  mu[0] = 1.0L;
  for (int n = 1; n <= n_max; ++n) {
    LD s = 0.0L;
    for (int k = 0; k < L; ++k) {
      LD inner = 0.0L;
      for (int l = 0; l < n; ++l) {
        const LD binom = factorial_ld(n) /
                         (factorial_ld(l) * factorial_ld(n - l));
        inner += binom * pow_int(LD(k), n - l) * mu[l];
      }
      s += bank.p[k] * inner;
    }
    const LD half_n = pow_int(0.5L, n);
    mu[n] = half_n * 0.5L * s / (1.0L - half_n);
  }
  return std::vector<double>(mu.begin(), mu.end());
}

std::vector<double> dyadic_refine(const std::vector<double>& values, int d,
                                  const FilterBank& bank) {
  const long L = bank.spec.support_end();
  const long len = long(values.size());
  if (len < L + 1 || (len - 1) % L != 0)
    throw Error("dyadic_refine: values do not cover a dyadic grid of the "
                "support");
  const long step = (len - 1) / L;
  if ((step & (step - 1)) != 0)
    throw Error("dyadic_refine: grid size is not a power of two per interval");

  std::vector<LD> w(values.begin(), values.end());
  const long coarse = len - 1;
  std::vector<LD> wn(2 * coarse + 1, 0.0L);
  for (long i = 0; i <= coarse; ++i) wn[2 * i] = w[i];
  const LD twod = pow_int(2.0L, d);
  for (long i = 1; i < 2 * coarse; i += 2) {
    LD s = 0.0L;
    for (int k = 0; k < bank.spec.filter_length(); ++k) {
      const long idx = i - k * step;
      if (idx >= 0 && idx <= coarse) s += bank.p[k] * w[idx];
    }
    wn[i] = twod * s;
  }
  return std::vector<double>(wn.begin(), wn.end());
}

std::vector<double> cascade_table(const FilterBank& bank, int d, int levels) {
  const std::vector<LD> w = cascade_ld(bank, d, levels);
  return std::vector<double>(w.begin(), w.end());
}

ScalingTables build_scaling_tables(const FilterBank& bank, int d_max,
                                   int dyadic_level) {
  if (d_max < 0) d_max = bank.spec.N - 1;
  ScalingTables t;
  t.spec = bank.spec;
  t.max_derivative = d_max;
  for (int d = 0; d <= d_max; ++d)
    t.integer_values.push_back(integer_values(bank, d));
  t.dyadic_level = dyadic_level;
  if (dyadic_level > 0)
    for (int d = 0; d <= d_max; ++d)
      t.dyadic_values.push_back(cascade_table(bank, d, dyadic_level));
  t.integral_values = integral_integer_values(bank);
  t.moments = wtk::moments(bank, bank.spec.N);
  return t;
}

std::string tables_to_json(const FilterBank& bank,
                           const ScalingTables& tables) {
  nlohmann::json j;
  j["N"] = bank.spec.N;
  j["M1"] = bank.spec.M1;
  j["p"] = bank.p_double();
  nlohmann::json iv;
  for (int d = 0; d <= tables.max_derivative; ++d)
    iv[std::to_string(d)] = tables.integer_values[d];
  j["integer_values"] = iv;
  j["integral_values"] = tables.integral_values;
  j["moments"] = tables.moments;
  return j.dump(2);
}

void tables_from_json(const std::string& text, FilterBank& bank,
                      ScalingTables& tables) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("tables_from_json: ") + e.what());
  }
  if (!j.contains("N") || !j.contains("M1") || !j.contains("p"))
    throw Error("tables_from_json: missing N/M1/p");
  CoifletSpec spec;
  spec.N = j["N"].get<int>();
  spec.M1 = j["M1"].get<int>();
  spec.validate();
  const std::vector<double> pd = j["p"].get<std::vector<double>>();
  if (int(pd.size()) != spec.filter_length())
    throw Error("tables_from_json: p has wrong length");
  bank.spec = spec;
  bank.p.assign(pd.begin(), pd.end());
  const std::vector<LD> scale = row_scales(spec);
  bank.residual_norm =
      double(max_abs(constraint_residuals(bank.p, spec, scale)));

  tables = ScalingTables{};
  tables.spec = spec;
  const nlohmann::json& iv = j.at("integer_values");
  int d = 0;
  while (iv.contains(std::to_string(d))) {
    tables.integer_values.push_back(
        iv.at(std::to_string(d)).get<std::vector<double>>());
    ++d;
  }
  if (d == 0) throw Error("tables_from_json: no integer_values");
  tables.max_derivative = d - 1;
  tables.integral_values = j.at("integral_values").get<std::vector<double>>();
  tables.moments = j.at("moments").get<std::vector<double>>();
  return;
}

}  // namespace wtk
