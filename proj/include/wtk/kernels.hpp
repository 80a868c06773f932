#pragma once

// Shared numerical plumbing: dense row-major matrices, partial-pivot LU solves,
// shifted inverse iteration, simultaneous polynomial root finding, composite
// Simpson quadrature, and least-squares slope fits.  Everything here is
// deterministic: fixed iteration orders, fixed starting configurations, no
// randomness.  Matrix sizes in this toolkit stay small (a few hundred at most),
// so cubic-cost dense algorithms are the right tool.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wtk/errors.hpp"

namespace wtk {

template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols, fill) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const T& operator()(int i, int j) const {
    return a_[static_cast<size_t>(i) * cols_ + j];
  }

  std::vector<T>& data() { return a_; }
  const std::vector<T>& data() const { return a_; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class U>
  Mat<U> cast() const {
    Mat<U> out(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) out(i, j) = static_cast<U>((*this)(i, j));
    return out;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

using MatD = Mat<double>;
using MatLD = Mat<long double>;

template <class T>
std::vector<T> matvec(const Mat<T>& a, const std::vector<T>& x) {
  std::vector<T> y(a.rows(), T{});
  for (int i = 0; i < a.rows(); ++i) {
    T s{};
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

namespace detail {

// In-place partial-pivot LU; returns the permutation as row swaps applied to rhs
// columns.  Throws Singular when a pivot falls below the scaled threshold.
template <class T>
void lu_solve_inplace(Mat<T>& m, Mat<T>& rhs) {
  const int n = m.rows();
  T scale{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(m(i, j)));
  if (scale == T{}) throw Singular("lu_solve: zero matrix");
  const T tiny = scale * T(1e-300L);
  for (int c = 0; c < n; ++c) {
    int r = c;
    T best = std::abs(m(c, c));
    for (int i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > best) {
        best = std::abs(m(i, c));
        r = i;
      }
    if (best <= tiny) throw Singular("lu_solve: pivot below threshold");
    if (r != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(r, j));
      for (int j = 0; j < rhs.cols(); ++j) std::swap(rhs(c, j), rhs(r, j));
    }
    const T pv = m(c, c);
    for (int i = c + 1; i < n; ++i) {
      const T f = m(i, c) / pv;
      if (f == T{}) continue;
      m(i, c) = f;
      for (int j = c + 1; j < n; ++j) m(i, j) -= f * m(c, j);
      for (int j = 0; j < rhs.cols(); ++j) rhs(i, j) -= f * rhs(c, j);
    }
  }
  for (int col = 0; col < rhs.cols(); ++col)
    for (int i = n - 1; i >= 0; --i) {
      T s = rhs(i, col);
      for (int j = i + 1; j < n; ++j) s -= m(i, j) * rhs(j, col);
      rhs(i, col) = s / m(i, i);
    }
}

}  // namespace detail

// Solve A x = b by partial-pivot LU.  A is taken by value (the factorization
// overwrites it).
template <class T>
std::vector<T> solve(Mat<T> a, const std::vector<T>& b) {
  Mat<T> rhs(a.rows(), 1);
  for (int i = 0; i < a.rows(); ++i) rhs(i, 0) = b[i];
  detail::lu_solve_inplace(a, rhs);
  std::vector<T> x(a.rows());
  for (int i = 0; i < a.rows(); ++i) x[i] = rhs(i, 0);
  return x;
}

// Solve A X = B column-wise with one factorization.
template <class T>
Mat<T> solve_matrix(Mat<T> a, Mat<T> b) {
  detail::lu_solve_inplace(a, b);
  return b;
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
  return solve_matrix(a, Mat<T>::identity(a.rows()));
}

// Eigenvector for a known (approximate) eigenvalue via shifted inverse
// iteration with clamped pivots, polished by a bordered Newton step so the
// residual reaches the round-off floor.  Returns a unit-norm vector.
// Throws NotAnEigenvalue when the final residual exceeds tol, and
// DegenerateEigenspace when a restart from an orthogonal seed converges to an
// independent direction (eigenspace dimension > 1).
template <class T>
std::vector<T> eigenvector_for(const Mat<T>& a, T lambda, T tol,
                               bool check_degenerate = true);

// Roots of a polynomial given by ascending coefficients c[0] + c[1] z + ...
// Aberth-Ehrlich simultaneous iteration from a fixed starting ring, with a
// companion-matrix QR fallback; results sorted by (Re, Im).
// Throws NoConvergence when residuals stay above 1e-10 * scale.
std::vector<std::complex<double>> poly_roots(
    const std::vector<std::complex<double>>& coeffs);

// Composite Simpson rule; sample count must be odd and >= 3.
template <class T>
T composite_quadrature(const std::vector<T>& samples, T spacing) {
  const size_t n = samples.size();
  if (n < 3 || n % 2 == 0)
    throw BadSampleCount("composite_quadrature: need an odd count >= 3");
  T s = samples.front() + samples.back();
  for (size_t i = 1; i + 1 < n; ++i) s += samples[i] * (i % 2 ? T(4) : T(2));
  return s * spacing / T(3);
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

inline long double factorial_ld(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// FNV-1a 64-bit over raw bytes; used for the decoupling checksums.
std::uint64_t fnv1a64(const void* data, std::size_t nbytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t checksum(const std::vector<double>& v, std::uint64_t seed);
std::uint64_t checksum(const MatD& m, std::uint64_t seed);

extern template std::vector<double> eigenvector_for(const MatD&, double, double,
                                                    bool);
extern template std::vector<long double> eigenvector_for(const MatLD&,
                                                         long double,
                                                         long double, bool);

}  // namespace wtk
