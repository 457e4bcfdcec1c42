#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "mop/errors.hpp"
#include "mop/prng.hpp"
#include "mop/scalar.hpp"

namespace mop {

template <class S>
using Vector = std::vector<S>;

// Dense row-major matrix over any scalar kind.  Sizes in this project are
// small (a few thousand at most on the banded paths, a few hundred dense),
// so clarity wins over blocking.
template <class S>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, const S& fill = S(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Vector<S> col(std::size_t j) const {
    Vector<S> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }
  Vector<S> row(std::size_t i) const {
    Vector<S> r(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
    return r;
  }
  void set_col(std::size_t j, const Vector<S>& c) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
  }

 private:
  std::size_t rows_, cols_;
  std::vector<S> data_;
};

// -- vector kernels ----------------------------------------------------------

template <class S>
S dot(const Vector<S>& x, const Vector<S>& y) {
  S s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

template <class S>
void axpy(const S& a, const Vector<S>& x, Vector<S>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

template <class S>
void scale(Vector<S>& x, const S& a) {
  for (auto& v : x) v *= a;
}

template <class S>
S norm_max(const Vector<S>& x) {
  S m(0);
  for (const auto& v : x) {
    S a = scalar_traits<S>::abs(v);
    if (m < a) m = a;
  }
  return m;
}

template <class S>
S norm_euclid(const Vector<S>& x) {
  static_assert(scalar_traits<S>::has_sqrt, "Euclidean norm needs a square root");
  return scalar_traits<S>::sqrt(dot(x, x));
}

// Column-normalization magnitude: Euclidean where a square root exists,
// max-absolute otherwise.  Over the exact kind the final monic recurrence
// matrix is invariant under any positive per-column scaling, so the cheaper
// exact norm changes nothing downstream.
template <class S>
S normalization_scale(const Vector<S>& x) {
  if constexpr (scalar_traits<S>::has_sqrt)
    return norm_euclid(x);
  else
    return norm_max(x);
}

// -- dense kernels -----------------------------------------------------------

template <class S>
Vector<S> matvec(const Matrix<S>& a, const Vector<S>& x) {
  Vector<S> y(a.rows(), S(0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    S s(0);
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

template <class S>
Vector<S> matTvec(const Matrix<S>& a, const Vector<S>& x) {
  Vector<S> y(a.cols(), S(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
  return y;
}

template <class S>
Matrix<S> matmul(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const S& aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class S>
Matrix<S> transpose(const Matrix<S>& a) {
  Matrix<S> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

template <class S>
S max_abs(const Matrix<S>& a) {
  S m(0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      S v = scalar_traits<S>::abs(a(i, j));
      if (m < v) m = v;
    }
  return m;
}

// -- triangular application --------------------------------------------------

// M <- L^{-1} M with L unit lower triangular (forward substitution by rows).
template <class S>
void apply_unit_lower_inverse_left(const Matrix<S>& l, Matrix<S>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t k = 0; k < i; ++k) {
      const S& lik = l(i, k);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= lik * m(k, j);
    }
}

// M <- M U^{-1} with U upper triangular, general diagonal (column sweep).
template <class S>
void apply_upper_inverse_right(const Matrix<S>& u, Matrix<S>& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      const S& ukj = u(k, j);
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) -= m(i, k) * ukj;
    }
    const S& d = u(j, j);
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) /= d;
  }
}

// -- factorizations ----------------------------------------------------------

template <class S>
struct LUFactors {
  Matrix<S> lower;  // unit diagonal
  Matrix<S> upper;  // general diagonal
};

// Unpivoted LU.  The pivot floor is supplied by the caller (scaled to the
// matrix at hand); exact kinds only ever reject a pivot that is exactly zero.
template <class S>
LUFactors<S> lu_unpivoted(Matrix<S> a, const S& pivot_floor) {
  const std::size_t n = a.rows();
  Matrix<S> l = Matrix<S>::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    const S piv = a(k, k);
    bool dead = scalar_traits<S>::is_exact ? piv == S(0)
                                           : !(pivot_floor < scalar_traits<S>::abs(piv));
    if (dead)
      throw solver_error(errc::lu_breakdown, "unpivoted LU pivot below floor",
                         static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k + 1; i < n; ++i) {
      S lik = a(i, k) / piv;
      l(i, k) = lik;
      a(i, k) = S(0);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  return {std::move(l), std::move(a)};
}

template <class S>
struct LDUFactors {
  Matrix<S> lower;   // unit diagonal
  Vector<S> diag;
  Matrix<S> upper;   // unit diagonal
};

// Unpivoted LDU used by the moment-matrix route.  A pivot that is exactly
// zero means a vanishing leading minor, i.e. the data fails the normality
// the factorization encodes; near-zero floating pivots are left to the
// caller's diagnostics, since this route exists primarily for exact data.
template <class S>
LDUFactors<S> ldu_unpivoted(Matrix<S> a) {
  const std::size_t n = a.rows();
  Matrix<S> l = Matrix<S>::identity(n);
  Vector<S> d(n, S(0));
  for (std::size_t k = 0; k < n; ++k) {
    const S piv = a(k, k);
    if (piv == S(0))
      throw solver_error(errc::lu_breakdown, "vanishing leading minor in LDU",
                         static_cast<std::ptrdiff_t>(k));
    d[k] = piv;
    for (std::size_t j = k; j < n; ++j) a(k, j) /= piv;
    for (std::size_t i = k + 1; i < n; ++i) {
      const S m = a(i, k);  // Schur entry; row k is unit-scaled, so it is
      l(i, k) = m / piv;    // also the subtraction multiplier, while L takes
      a(i, k) = S(0);       // the pivot-relative value.
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  return {std::move(l), std::move(d), std::move(a)};
}

// Partially pivoted linear solve for small dense systems.
template <class S>
Vector<S> solve_pivoted(Matrix<S> a, Vector<S> b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    S best = scalar_traits<S>::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      S cand = scalar_traits<S>::abs(a(i, k));
      if (best < cand) { best = cand; p = i; }
    }
    if (a(p, k) == S(0))
      throw solver_error(errc::lu_breakdown, "singular system in pivoted solve",
                         static_cast<std::ptrdiff_t>(k));
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      S m = a(i, k) / a(k, k);
      a(i, k) = S(0);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  Vector<S> x(n, S(0));
  for (std::size_t i = n; i-- > 0;) {
    S s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

// Numerical rank by fully pivoted elimination.  A step whose best remaining
// pivot falls below n * eps * (largest pivot accepted so far) ends the
// count; the exact kind stops only at a structurally zero block.
template <class S>
std::size_t elimination_rank(Matrix<S> a) {
  const std::size_t n = a.rows() < a.cols() ? a.rows() : a.cols();
  const S eps = scalar_traits<S>::epsilon();
  const S dim = S(static_cast<int>(a.rows() > a.cols() ? a.rows() : a.cols()));
  S largest(0);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pi = k, pj = k;
    S best(0);
    for (std::size_t i = k; i < a.rows(); ++i)
      for (std::size_t j = k; j < a.cols(); ++j) {
        S cand = scalar_traits<S>::abs(a(i, j));
        if (best < cand) { best = cand; pi = i; pj = j; }
      }
    if (k == 0) largest = best;
    bool dead = scalar_traits<S>::is_exact ? best == S(0) : !(dim * eps * largest < best);
    if (dead) break;
    if (largest < best) largest = best;
    if (pi != k)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(k, j), a(pi, j));
    if (pj != k)
      for (std::size_t i = 0; i < a.rows(); ++i) std::swap(a(i, k), a(i, pj));
    ++rank;
    for (std::size_t i = k + 1; i < a.rows(); ++i) {
      S m = a(i, k) / a(k, k);
      for (std::size_t j = k; j < a.cols(); ++j) a(i, j) -= m * a(k, j);
    }
  }
  return rank;
}

// Element growth of unpivoted elimination, measured on the in-place tableau.
// Schur-complement updates are compared against the largest initial entry;
// the multipliers stored where the eliminated entries sat are dimensionless
// ratios already — invariant under any global rescaling of the matrix — and
// enter the maximum at face value.  Pivoting exists precisely to cap the
// multipliers at one; without it they are where graded matrices explode
// first, and dividing them by the matrix's scale would hide exactly that.
template <class S>
S unpivoted_growth(Matrix<S> a) {
  const std::size_t n = a.rows();
  const S base = max_abs(a);
  if (base == S(0)) return S(0);
  S peak = S(1);
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == S(0))
      throw solver_error(errc::lu_breakdown, "zero pivot while measuring growth",
                         static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const S m = a(i, k) / a(k, k);
      {
        S v = scalar_traits<S>::abs(m);
        if (peak < v) peak = v;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) -= m * a(k, j);
        S v = scalar_traits<S>::abs(a(i, j)) / base;
        if (peak < v) peak = v;
      }
      a(i, k) = m;
    }
  }
  return peak;
}

// Largest singular value by power iteration on A^T A.  Deterministic start,
// relative tolerance on successive estimates; after the budget the current
// estimate is returned (this is a diagnostic, clustered spectra should not
// abort a run).
template <class S>
S spectral_norm(const Matrix<S>& a, double rel_tol = 1e-10, int max_iter = 10000) {
  static_assert(scalar_traits<S>::has_sqrt, "spectral norm needs a square root");
  if (a.rows() == 0 || a.cols() == 0) return S(0);
  xorshift64star rng(0x5eedULL);
  Vector<S> v(a.cols());
  for (auto& x : v) x = scalar_traits<S>::from_double(rng.next_symmetric());
  S nv = norm_euclid(v);
  if (nv == S(0)) v[0] = S(1); else scale(v, S(1) / nv);
  const S tol = scalar_traits<S>::from_double(rel_tol);
  S sigma(0);
  for (int it = 0; it < max_iter; ++it) {
    Vector<S> w = matvec(a, v);
    S s = norm_euclid(w);
    if (s == S(0)) return S(0);
    Vector<S> u = matTvec(a, w);
    S nu = norm_euclid(u);
    if (nu == S(0)) return s;
    scale(u, S(1) / nu);
    v = std::move(u);
    S diff = scalar_traits<S>::abs(s - sigma);
    sigma = s;
    if (it > 0 && !(tol * sigma < diff)) break;
  }
  return sigma;
}

}  // namespace mop
