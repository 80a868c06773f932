#include "wtk/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <numbers>

namespace wtk {

namespace {

// Clamped-pivot LU solve used by inverse iteration: near-singular pivots are
// clamped instead of rejected, because the shifted matrix is singular by
// construction and the solve is meant to amplify its null direction.
template <class T>
std::vector<T> clamped_solve(Mat<T> m, std::vector<T> x) {
  const int n = m.rows();
  T scale{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  const T clamp =
      std::max(scale, T(1)) * std::numeric_limits<T>::epsilon() * T(1e-3L);
  for (int c = 0; c < n; ++c) {
    int r = c;
    T best = std::abs(m(c, c));
    for (int i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > best) {
        best = std::abs(m(i, c));
        r = i;
      }
    if (r != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(r, j));
      std::swap(x[c], x[r]);
    }
    T pv = m(c, c);
    if (std::abs(pv) < clamp) {
      pv = pv >= T{} ? clamp : -clamp;
      m(c, c) = pv;
    }
    for (int i = c + 1; i < n; ++i) {
      const T f = m(i, c) / pv;
      if (f == T{}) continue;
      for (int j = c + 1; j < n; ++j) m(i, j) -= f * m(c, j);
      x[i] -= f * x[c];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    T s = x[i];
    for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

template <class T>
void normalize(std::vector<T>& v) {
  T s{};
  for (const T& x : v) s += x * x;
  s = std::sqrt(s);
  for (T& x : v) x /= s;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s{};
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// One inverse-iteration pass (several sweeps) from a given start, optionally
// re-orthogonalized against a known eigenvector each sweep.  The deflation is
// applied twice per sweep: the solve amplifies the deflated direction by the
// reciprocal pivot clamp, so a single subtraction leaves too much residue.
template <class T>
std::vector<T> inverse_iterate(const Mat<T>& shifted, std::vector<T> v,
                               const std::vector<T>* against, int sweeps) {
  for (int s = 0; s < sweeps; ++s) {
    v = clamped_solve(shifted, v);
    if (against) {
      for (int pass = 0; pass < 2; ++pass) {
        const T c = dot(v, *against);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= c * (*against)[i];
      }
    }
    normalize(v);
  }
  return v;
}

template <class T>
T residual_norm(const Mat<T>& shifted, const std::vector<T>& v) {
  const std::vector<T> r = matvec(shifted, v);
  return std::sqrt(dot(r, r));
}

}  // namespace

template <class T>
std::vector<T> eigenvector_for(const Mat<T>& a, T lambda, T tol,
                               bool check_degenerate) {
  const int n = a.rows();
  Mat<T> shifted = a;
  for (int i = 0; i < n; ++i) shifted(i, i) -= lambda;

  std::vector<T> v(n, T(1) / std::sqrt(T(n)));
  v = inverse_iterate(shifted, v, static_cast<const std::vector<T>*>(nullptr),
                      8);

  // Bordered Newton polish with the eigenvalue held fixed:
  //   [shifted, -v; v^T, 0] [dv; mu] = [-shifted v; 0]
  for (int step = 0; step < 3; ++step) {
    Mat<T> bm(n + 1, n + 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) bm(i, j) = shifted(i, j);
      bm(i, n) = -v[i];
      bm(n, i) = v[i];
    }
    const std::vector<T> r = matvec(shifted, v);
    std::vector<T> rhs(n + 1, T{});
    for (int i = 0; i < n; ++i) rhs[i] = -r[i];
    std::vector<T> sol;
    try {
      sol = solve(bm, rhs);
    } catch (const Singular&) {
      break;  // polish is best-effort; the residual check below decides
    }
    for (int i = 0; i < n; ++i) v[i] += sol[i];
    normalize(v);
  }

  const T resid = residual_norm(shifted, v);
  if (!(resid <= tol))
    throw NotAnEigenvalue("eigenvector_for: residual " + std::to_string((double)resid) +
                          " exceeds tolerance");

  if (check_degenerate && n > 1) {
    // Restart from a fixed generic direction, deflating the found vector
    // every sweep.  A 2-or-more-dimensional eigenspace contains a direction
    // orthogonal to v, and the deflated iteration converges to it; for a
    // simple eigenvalue the deflated iterate cannot reach a small residual.
    std::vector<T> w(n);
    for (int i = 0; i < n; ++i) w[i] = std::cos(T(i + 1));
    const T c = dot(w, v);
    for (int i = 0; i < n; ++i) w[i] -= c * v[i];
    normalize(w);
    w = inverse_iterate(shifted, w, &v, 8);
    // Final cleanup: if nothing genuinely independent of v survived, the
    // restart collapsed back onto v (rounding residue) and proves nothing.
    const T c2 = dot(w, v);
    for (int i = 0; i < n; ++i) w[i] -= c2 * v[i];
    T nrm{};
    for (const T& x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > T(0.5L)) {
      for (T& x : w) x /= nrm;
      if (residual_norm(shifted, w) <= tol * T(10))
        throw DegenerateEigenspace("eigenvector_for: eigenspace dimension > 1");
    }
  }
  return v;
}

template std::vector<double> eigenvector_for(const MatD&, double, double, bool);
template std::vector<long double> eigenvector_for(const MatLD&, long double,
                                                  long double, bool);

namespace {

using cd = std::complex<double>;

cd horner(const std::vector<cd>& c, cd z) {
  cd s = c.back();
  for (size_t i = c.size() - 1; i-- > 0;) s = s * z + c[i];
  return s;
}

cd horner_deriv(const std::vector<cd>& c, cd z) {
  cd s = c.back() * double(c.size() - 1);
  for (size_t i = c.size() - 1; i-- > 1;) s = s * z + c[i] * double(i);
  return s;
}

double residual_scale(const std::vector<cd>& c, cd z) {
  const double az = std::max(1.0, std::abs(z));
  double s = 0.0, pw = 1.0;
  for (const cd& ci : c) {
    s += std::abs(ci) * pw;
    pw *= az;
  }
  return s;
}

bool residuals_ok(const std::vector<cd>& c, const std::vector<cd>& roots) {
  // Negated comparison so NaN residuals (or NaN scales) count as failures.
  for (const cd& z : roots)
    if (!(std::abs(horner(c, z)) <= 1e-10 * residual_scale(c, z)))
      return false;
  return true;
}

std::vector<cd> aberth(const std::vector<cd>& c) {
  const int deg = int(c.size()) - 1;
  double bound = 0.0;
  for (int i = 0; i < deg; ++i)
    bound = std::max(bound, std::abs(c[i] / c[deg]));
  const double radius = 1.0 + bound;
  std::vector<cd> z(deg);
  for (int k = 0; k < deg; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.35) / deg;
    z[k] = radius * cd(std::cos(th), std::sin(th));
  }
  for (int it = 0; it < 400; ++it) {
    double worst = 0.0;
    for (int k = 0; k < deg; ++k) {
      const cd pk = horner(c, z[k]);
      const cd dk = horner_deriv(c, z[k]);
      if (pk == cd(0)) continue;
      cd w = (dk == cd(0)) ? cd(0) : pk / dk;
      cd sum = 0.0;
      for (int j = 0; j < deg; ++j) {
        if (j == k) continue;
        const cd diff = z[k] - z[j];
        if (std::abs(diff) < 1e-300) continue;
        sum += 1.0 / diff;
      }
      const cd denom = 1.0 - w * sum;
      const cd corr = (std::abs(denom) < 1e-300) ? w : w / denom;
      z[k] -= corr;
      worst = std::max(worst, std::abs(corr) / (1.0 + std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

// Explicit single-shift QR on the companion matrix.  The matrix is upper
// Hessenberg and stays so: each iteration factorizes (H - sigma I) = QR with
// Givens rotations, forms RQ + sigma I, and deflates converged eigenvalues at
// the bottom of the active block.  Sizes here are tiny, so clarity wins.
std::vector<cd> companion_eigs(const std::vector<cd>& monic) {
  const int n = int(monic.size()) - 1;
  std::vector<std::vector<cd>> h(n, std::vector<cd>(n, cd(0)));
  for (int i = 1; i < n; ++i) h[i][i - 1] = 1.0;
  for (int i = 0; i < n; ++i) h[i][n - 1] = -monic[i];

  std::vector<cd> eig;
  eig.reserve(n);
  int hi = n - 1;
  int stalled = 0;
  int guard = 200 * n + 400;
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(h[0][0]);
      break;
    }
    if (std::abs(h[hi][hi - 1]) <=
        1e-16 * (std::abs(h[hi - 1][hi - 1]) + std::abs(h[hi][hi]))) {
      eig.push_back(h[hi][hi]);
      --hi;
      stalled = 0;
      continue;
    }
    if (--guard <= 0) throw NoConvergence("companion_eigs: QR did not deflate");

    // Wilkinson shift from the trailing 2x2; an occasional exceptional shift
    // breaks symmetry-induced stalls.
    cd shift;
    if (++stalled % 16 == 0) {
      shift = h[hi][hi] + cd(0.9, 0.0) * std::abs(h[hi][hi - 1]);
    } else {
      const cd a = h[hi - 1][hi - 1], b = h[hi - 1][hi];
      const cd c2 = h[hi][hi - 1], d = h[hi][hi];
      const cd tr = a + d;
      const cd disc = std::sqrt(tr * tr - 4.0 * (a * d - b * c2));
      const cd r1 = (tr + disc) / 2.0, r2 = (tr - disc) / 2.0;
      shift = (std::abs(r1 - d) < std::abs(r2 - d)) ? r1 : r2;
    }

    for (int k = 0; k <= hi; ++k) h[k][k] -= shift;

    // QR by Givens: G_k zeroes h[k+1][k]; rows k, k+1 get
    // [conj(c), conj(s); -s, c].
    std::vector<cd> cs(hi), sn(hi);
    for (int k = 0; k < hi; ++k) {
      const cd x = h[k][k], y = h[k + 1][k];
      const double r = std::hypot(std::abs(x), std::abs(y));
      cd ck(1.0), sk(0.0);
      if (r > 0.0) {
        ck = x / r;
        sk = y / r;
      }
      cs[k] = ck;
      sn[k] = sk;
      for (int j = k; j <= hi; ++j) {
        const cd t1 = h[k][j], t2 = h[k + 1][j];
        h[k][j] = std::conj(ck) * t1 + std::conj(sk) * t2;
        h[k + 1][j] = -sk * t1 + ck * t2;
      }
    }
    // RQ: multiply by G_k^H = [c, -conj(s); s, conj(c)] on the right, columns
    // k and k+1; fill appears one band below the diagonal only.
    for (int k = 0; k < hi; ++k) {
      const int top = std::min(k + 1, hi);
      for (int i = 0; i <= top; ++i) {
        const cd t1 = h[i][k], t2 = h[i][k + 1];
        h[i][k] = t1 * cs[k] + t2 * sn[k];
        h[i][k + 1] = -t1 * std::conj(sn[k]) + t2 * std::conj(cs[k]);
      }
    }
    for (int k = 0; k <= hi; ++k) h[k][k] += shift;
  }
  return eig;
}

}  // namespace

std::vector<cd> poly_roots(const std::vector<cd>& coeffs) {
  if (coeffs.size() < 2) throw Error("poly_roots: degree must be >= 1");
  int deg = int(coeffs.size()) - 1;
  while (deg > 0 && coeffs[deg] == cd(0)) --deg;
  if (deg < 1) throw Error("poly_roots: leading coefficient is zero");

  // Factor out exact roots at the origin (trailing zero coefficients).
  int zeros = 0;
  while (zeros < deg && coeffs[zeros] == cd(0)) ++zeros;

  std::vector<cd> roots(zeros, cd(0));
  const int m = deg - zeros;
  if (m > 0) {
    std::vector<cd> monic(m + 1);
    for (int i = 0; i <= m; ++i) monic[i] = coeffs[zeros + i] / coeffs[deg];
    std::vector<cd> found = aberth(monic);
    if (!residuals_ok(monic, found)) {
      found = companion_eigs(monic);
      // polish the fallback with a few Newton steps per root
      for (cd& z : found)
        for (int it = 0; it < 8; ++it) {
          const cd p = horner(monic, z);
          const cd d = horner_deriv(monic, z);
          if (std::abs(d) < 1e-300) break;
          z -= p / d;
        }
      if (!residuals_ok(monic, found))
        throw NoConvergence("poly_roots: residuals above 1e-10 * scale");
    }
    roots.insert(roots.end(), found.begin(), found.end());
  }

  std::sort(roots.begin(), roots.end(), [](const cd& a, const cd& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

std::uint64_t fnv1a64(const void* data, std::size_t nbytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t checksum(const std::vector<double>& v, std::uint64_t seed) {
  return fnv1a64(v.data(), v.size() * sizeof(double), seed);
}

std::uint64_t checksum(const MatD& m, std::uint64_t seed) {
  return checksum(m.data(), seed);
}

}  // namespace wtk
