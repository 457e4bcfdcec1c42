#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "mop/double_double.hpp"
#include "mop/model.hpp"

namespace mop {

// Output of every solver: the monic recurrence matrix plus the basis pair it
// was read off from.  h_basis is the (possibly non-monic) matrix the stored
// bases actually satisfy; for solvers that produce a monic matrix directly
// the two are identical.
template <class S>
struct SolveResult {
  BandedHessenberg<S> h;        // monic: unit subdiagonal
  BandedHessenberg<S> h_basis;  // recurrence matrix of the stored bases
  Matrix<S> w;                  // rows sampled on the nodes; W^T V = I
  Matrix<S> v;
};

namespace detail {

template <class S>
Matrix<S> pack_columns(const std::vector<Vector<S>>& cols) {
  Matrix<S> m(cols.empty() ? 0 : cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = cols[j][i];
  return m;
}

// Scalar accumulator that defers all rounding to a single final sum: partial
// sums stay exact via error-free transformations, with the residue collected
// in a carry term.  Costs a few flops per term and makes the accumulated
// value independent of how many terms went in.
struct compensated {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const DoubleDouble t = DoubleDouble::two_sum(sum, x);
    sum = t.hi();
    carry += t.lo();
  }
  void add_product(double a, double b) {
    const DoubleDouble p = DoubleDouble::two_prod(a, b);
    add(p.hi());
    carry += p.lo();
  }
  double value() const { return sum + carry; }
};

inline double compensated_dot(const Vector<double>& a, const Vector<double>& b) {
  compensated acc;
  for (std::size_t i = 0; i < a.size(); ++i) acc.add_product(a[i], b[i]);
  return acc.value();
}

}  // namespace detail

// Two-starting-vector recurrence solve.  Builds monic v-columns by explicit
// residuals and w-columns by the lagged three-term update
//   w_hat_{n+1} = Z w_{n-1} - super1[n-1] w_n - diag[n-1] w_{n-1} - w_{n-2},
// finalized one step later by the superdiagonal coupling
//   super2[n-1] = w_{n-1}^T Z v_{n+1},
// which also serves as the breakdown pivot: |super2| at or below
// 1000 * eps * ||Z w_{n-1}|| (exact kinds: zero) stops the recurrence.
//
// In double, every coefficient dot and every v-residual entry is evaluated
// with one final rounding (detail::compensated), and the w-updates fuse each
// multiply-subtract.  With no reorthogonalization, the per-step rounding of
// these formulas is the seed noise the unnormalized recurrence amplifies;
// paying a few flops per term to keep each evaluated value at working
// precision delays — it cannot prevent — the loss of biorthogonality, and
// measurably widens the range of sizes where the computed matrix still
// tracks the data's conditioning.  Exact kinds evaluate the same formulas
// directly.
template <class S>
SolveResult<S> iep_kryl(const DiscreteSystem<S>& sys) {
  validate_system(sys);
  const std::size_t n = sys.size();
  const StartingVectors<S> sv = starting_vectors(sys);
  const S tol = S(1000) * scalar_traits<S>::epsilon();

  auto pair_dot = [](const Vector<S>& a, const Vector<S>& b) {
    if constexpr (std::is_same_v<S, double>)
      return detail::compensated_dot(a, b);
    else
      return dot(a, b);
  };

  std::vector<Vector<S>> w, v;
  w.reserve(n);
  v.reserve(n);
  w.push_back(sv.w1);
  w.push_back(sv.w2);
  v.push_back(sv.v1);

  BandedHessenberg<S> h = BandedHessenberg<S>::zero(n);
  for (auto& s : h.sub) s = S(1);

  // Pending numerator of the next w-column and the scale of the vector it
  // was built from, waiting for its superdiagonal divisor.
  Vector<S> w_pending;
  S w_pending_scale(0);

  for (std::size_t k = 0; k < n; ++k) {
    const Vector<S> zv = node_multiply(sys, v[k]);

    if (k >= 2) {
      const S d = pair_dot(w[k - 2], zv);
      h.super2[k - 2] = d;
      if (scalar_traits<S>::abs(d) <= tol * w_pending_scale)
        throw solver_error(errc::breakdown, "superdiagonal coupling vanished",
                           static_cast<std::ptrdiff_t>(k));
      Vector<S> wk = std::move(w_pending);
      scale(wk, S(1) / d);
      w.push_back(std::move(wk));
    }

    h.diag[k] = pair_dot(w[k], zv);
    if (k >= 1) h.super1[k - 1] = pair_dot(w[k - 1], zv);

    if (k + 1 < n) {
      Vector<S> next = zv;
      if constexpr (std::is_same_v<S, double>) {
        for (std::size_t i = 0; i < n; ++i) {
          detail::compensated r;
          r.add(zv[i]);
          r.add_product(-h.diag[k], v[k][i]);
          if (k >= 1) r.add_product(-h.super1[k - 1], v[k - 1][i]);
          if (k >= 2) r.add_product(-h.super2[k - 2], v[k - 2][i]);
          next[i] = r.value();
        }
      } else {
        axpy(-h.diag[k], v[k], next);
        if (k >= 1) axpy(-h.super1[k - 1], v[k - 1], next);
        if (k >= 2) axpy(-h.super2[k - 2], v[k - 2], next);
      }
      v.push_back(std::move(next));
    }

    // Numerator of w_{k+1}; its divisor super2[k-1] appears at step k + 1.
    if (k >= 1 && k + 1 < n) {
      Vector<S> zw = node_multiply(sys, w[k - 1]);
      w_pending_scale = normalization_scale(zw);
      if constexpr (std::is_same_v<S, double>) {
        for (std::size_t i = 0; i < n; ++i) {
          double r = std::fma(-h.diag[k - 1], w[k - 1][i], zw[i]);
          r = std::fma(-h.super1[k - 1], w[k][i], r);
          if (k >= 2) r -= w[k - 2][i];
          zw[i] = r;
        }
      } else {
        axpy(-h.diag[k - 1], w[k - 1], zw);
        axpy(-h.super1[k - 1], w[k], zw);
        if (k >= 2) axpy(S(-1), w[k - 2], zw);
      }
      w_pending = std::move(zw);
    }
  }

  SolveResult<S> out;
  out.h = h;
  out.h_basis = std::move(h);
  out.w = detail::pack_columns(w);
  out.v = detail::pack_columns(v);
  return out;
}

enum class ReorthWindow {
  partial,  // trailing window of three columns
  full      // every computed column
};

// Normalized variant: every stored column has unit Euclidean norm and
// biorthogonality is carried in the diagonal sigma_j = w_j^T v_j.  Each step
// projects Z v_{n-1} and Z w_{n-2} against the window by blocked classical
// Gram-Schmidt with exactly one repeated pass (coefficients accumulated),
// then normalizes.  Two trailing projections complete the last recurrence
// columns without producing new basis vectors.  The recurrence matrix is
// read from the w-side coefficients; the returned v-columns are divided by
// sigma so the pair is exactly biorthonormal in exact arithmetic.
template <class S>
SolveResult<S> iep_krylreorth(const DiscreteSystem<S>& sys, ReorthWindow window) {
  static_assert(scalar_traits<S>::has_sqrt,
                "the normalized variant needs Euclidean norms; exact kinds use iep_kryl");
  validate_system(sys);
  const std::size_t n = sys.size();
  const StartingVectors<S> sv = starting_vectors(sys);
  const S tol = S(1000) * scalar_traits<S>::epsilon();

  std::vector<Vector<S>> w, v;
  w.reserve(n);
  v.reserve(n);
  Vector<S> sigma(n, S(0));

  {
    Vector<S> w0 = sv.w1, w1 = sv.w2, v0 = sv.v1;
    scale(w0, S(1) / norm_euclid(w0));
    scale(w1, S(1) / norm_euclid(w1));
    scale(v0, S(1) / norm_euclid(v0));
    w.push_back(std::move(w0));
    w.push_back(std::move(w1));
    v.push_back(std::move(v0));
    sigma[0] = dot(w.front(), v.front());
    if (scalar_traits<S>::abs(sigma[0]) <= tol)
      throw solver_error(errc::breakdown, "starting columns are numerically orthogonal", 0);
  }

  // Coefficient tables of the two coupled recurrences, indexed [row][col].
  Matrix<S> hw(n, n);  // column k: Z w_k expanded in the w-columns
  const std::size_t band = 3;

  auto window_lo = [&](std::size_t hi) {
    if (window == ReorthWindow::full) return std::size_t{0};
    return hi + 1 >= band ? hi + 1 - band : std::size_t{0};
  };

  // One blocked classical Gram-Schmidt sweep of x against basis columns
  // [lo, hi] of `against`, coefficients scaled by 1/sigma and accumulated
  // into coeff[lo..hi]; components removed along `subtract` columns.
  auto gs_sweep = [&](Vector<S>& x, const std::vector<Vector<S>>& against,
                      const std::vector<Vector<S>>& subtract, std::size_t lo,
                      std::size_t hi, Vector<S>& coeff) {
    Vector<S> c(hi - lo + 1, S(0));
    for (std::size_t j = lo; j <= hi; ++j) c[j - lo] = dot(against[j], x) / sigma[j];
    for (std::size_t j = lo; j <= hi; ++j) axpy(-c[j - lo], subtract[j], x);
    for (std::size_t j = lo; j <= hi; ++j) coeff[j] += c[j - lo];
  };

  for (std::size_t k = 1; k < n; ++k) {
    // v-side: new column from Z v_{k-1}.
    {
      Vector<S> x = node_multiply(sys, v[k - 1]);
      const S scale0 = norm_euclid(x);
      const std::size_t lo = window_lo(k - 1);
      Vector<S> coeff(n, S(0));
      gs_sweep(x, w, v, lo, k - 1, coeff);
      gs_sweep(x, w, v, lo, k - 1, coeff);
      const S a = norm_euclid(x);
      if (a <= tol * scale0)
        throw solver_error(errc::breakdown, "v-residual vanished under projection",
                           static_cast<std::ptrdiff_t>(k));
      scale(x, S(1) / a);
      v.push_back(std::move(x));
    }

    // w-side: new column from Z w_{k-2}; the two given starting columns
    // cover k = 1.
    if (k >= 2) {
      Vector<S> x = node_multiply(sys, w[k - 2]);
      const S scale0 = norm_euclid(x);
      const std::size_t lo = window_lo(k - 1);
      Vector<S> coeff(n, S(0));
      gs_sweep(x, v, w, lo, k - 1, coeff);
      gs_sweep(x, v, w, lo, k - 1, coeff);
      for (std::size_t j = lo; j <= k - 1; ++j) hw(j, k - 2) = coeff[j];
      const S a = norm_euclid(x);
      if (a <= tol * scale0)
        throw solver_error(errc::breakdown, "w-residual vanished under projection",
                           static_cast<std::ptrdiff_t>(k));
      hw(k, k - 2) = a;
      scale(x, S(1) / a);
      w.push_back(std::move(x));
    }

    sigma[k] = dot(w[k], v[k]);
    if (scalar_traits<S>::abs(sigma[k]) <= tol)
      throw solver_error(errc::breakdown, "biorthogonality collapsed",
                         static_cast<std::ptrdiff_t>(k));
  }

  // Trailing projections (no re-pass, no new columns) fill the last two
  // w-side coefficient columns.
  for (std::size_t col : {n - 2, n - 1}) {
    Vector<S> x = node_multiply(sys, w[col]);
    const std::size_t lo = window_lo(n - 1);
    for (std::size_t j = lo; j <= n - 1; ++j) hw(j, col) = dot(v[j], x) / sigma[j];
  }

  // The transpose of the w-side table is the recurrence matrix of the pair
  // (W, V Sigma^{-1}).  With the full window the entries outside the
  // structural band are projection residue and are dropped.
  BandedHessenberg<S> pre = BandedHessenberg<S>::zero(n);
  for (std::size_t i = 0; i < n; ++i) pre.diag[i] = hw(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pre.sub[i] = hw(i, i + 1);
    pre.super1[i] = hw(i + 1, i);
  }
  for (std::size_t i = 0; i + 2 < n; ++i) pre.super2[i] = hw(i + 2, i);

  for (std::size_t j = 0; j < n; ++j) {
    const S inv = S(1) / sigma[j];
    for (auto& col_entry : v[j]) col_entry *= inv;
  }

  SolveResult<S> out;
  out.h = monic_rescale(pre);
  out.h_basis = std::move(pre);
  out.w = detail::pack_columns(w);
  out.v = detail::pack_columns(v);
  return out;
}

}  // namespace mop
