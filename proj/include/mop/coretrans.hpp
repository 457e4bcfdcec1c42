#pragma once

#include <cstddef>
#include <type_traits>

#include "mop/double_double.hpp"
#include "mop/krylov.hpp"
#include "mop/model.hpp"

namespace mop {

namespace detail {

// Scalar used to accumulate the basis operator products Wt and V.  Plain
// double carries compensated (double-double) accumulation there: the chase
// coefficients can be large, and rounding each O(tau)-sized update would
// bury the pair's biorthogonality under representation noise that says
// nothing about the transformation sequence itself.  Everything the
// algorithm *decides* on — the working matrix, the pairing matrix, the
// coordinate vectors, every tau and LU factor — stays in the working
// precision, so the recurrence output is bit-identical either way.
template <class S>
struct basis_accumulator {
  using type = S;
};
template <>
struct basis_accumulator<double> {
  using type = DoubleDouble;
};

}  // namespace detail

// Core-transformation solve.  State: M (starts as diag of the nodes) is
// carried to the banded recurrence matrix by paired elementary row/column
// operations; Wt and V accumulate the two transformation products so that
// M = Wt Z V and B = Wt V throughout; p, q, s are the coordinates of the
// starting vectors in the evolving bases and are driven to e0, e1, e0.
// Eliminations work from the bottom upward, each inner sweep followed by an
// unpivoted LU of B that restores exact biorthogonality, and trailing
// similarity chases push the bulges off the band.  Every eliminated entry
// is assigned an exact zero, so the final M is banded to the last bit and
// the band extraction asserts as much.
template <class S>
SolveResult<S> iep_core(const DiscreteSystem<S>& sys) {
  validate_system(sys);
  const std::size_t n = sys.size();
  const StartingVectors<S> sv = starting_vectors(sys);
  using A = typename detail::basis_accumulator<S>::type;

  Matrix<S> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = sys.nodes[i];
  Matrix<S> b = Matrix<S>::identity(n);
  Matrix<A> wt = Matrix<A>::identity(n);
  Matrix<A> v = Matrix<A>::identity(n);
  // When the basis operators carry compensated accumulation, the factors
  // absorbed into them must come from the pairing those operators actually
  // satisfy, not from its working-precision rounding; ba shadows B for that
  // purpose.  All decisions (pivot floors, breakdowns) stay with B itself.
  Matrix<A> ba;
  if constexpr (!std::is_same_v<A, S>) ba = Matrix<A>::identity(n);
  Vector<S> p = sv.w1, q = sv.w2, s = sv.v1;

  auto rows_combine = [n](auto& a, std::size_t dst, std::size_t src, const S& coef) {
    using T = std::decay_t<decltype(a(0, 0))>;
    const T c(coef);
    for (std::size_t k = 0; k < n; ++k) a(dst, k) += c * a(src, k);
  };
  auto cols_combine = [n](auto& a, std::size_t dst, std::size_t src, const S& coef) {
    using T = std::decay_t<decltype(a(0, 0))>;
    const T c(coef);
    for (std::size_t k = 0; k < n; ++k) a(k, dst) += c * a(k, src);
  };
  auto ratio = [](const S& num, const S& den, std::size_t where) {
    if (den == S(0))
      throw solver_error(errc::chase_pivot, "elimination pivot is zero",
                         static_cast<std::ptrdiff_t>(where));
    S t = num / den;
    if (!scalar_traits<S>::finite(t))
      throw solver_error(errc::chase_pivot, "elimination ratio overflowed",
                         static_cast<std::ptrdiff_t>(where));
    return t;
  };

  // Row-side elimination zeroing t[j] against t[j-1]; the sibling
  // coordinate vector u receives the same combination.
  auto row_elim = [&](Vector<S>& t, Vector<S>& u, std::size_t j) {
    const S tau = -ratio(t[j], t[j - 1], j);
    t[j] = S(0);
    u[j] += tau * u[j - 1];
    rows_combine(m, j - 1, j, -tau);
    rows_combine(b, j - 1, j, -tau);
    if constexpr (!std::is_same_v<A, S>) rows_combine(ba, j - 1, j, -tau);
    rows_combine(wt, j - 1, j, -tau);
  };

  // Column-side elimination zeroing s[j] against s[j-1].
  auto col_elim = [&](std::size_t j) {
    const S tau = -ratio(s[j], s[j - 1], j);
    s[j] = S(0);
    cols_combine(m, j - 1, j, -tau);
    cols_combine(b, j - 1, j, -tau);
    if constexpr (!std::is_same_v<A, S>) cols_combine(ba, j - 1, j, -tau);
    cols_combine(v, j - 1, j, -tau);
  };

  // Restore B = I: factor B = L U and absorb the factors into both sides.
  auto lu_biorth = [&]() {
    S floor(0);
    if constexpr (!scalar_traits<S>::is_exact)
      floor = S(static_cast<int>(n)) * scalar_traits<S>::epsilon() * spectral_norm(b);
    LUFactors<S> f = lu_unpivoted(b, floor);
    apply_unit_lower_inverse_left(f.lower, m);
    apply_upper_inverse_right(f.upper, m);
    if constexpr (std::is_same_v<A, S>) {
      apply_unit_lower_inverse_left(f.lower, wt);
      apply_upper_inverse_right(f.upper, v);
    } else {
      LUFactors<A> fa = lu_unpivoted(ba, A(0));
      apply_unit_lower_inverse_left(fa.lower, wt);
      apply_upper_inverse_right(fa.upper, v);
      ba = Matrix<A>::identity(n);
    }
    p = matTvec(f.lower, p);
    q = matTvec(f.lower, q);
    s = matvec(f.upper, s);
    b = Matrix<S>::identity(n);
  };

  // Similarity chases: zero a bulge at M(r, c) and push it along the band.
  // They act on index pairs whose coordinate entries are already zero, so
  // p, q, s are untouched and B stays the identity.
  auto chase_lower = [&](std::size_t r, std::size_t c) {
    const S tau = ratio(m(r, c), m(r - 1, c), r);
    rows_combine(m, r, r - 1, -tau);
    rows_combine(wt, r, r - 1, -tau);
    m(r, c) = S(0);
    cols_combine(m, r - 1, r, tau);
    cols_combine(v, r - 1, r, tau);
  };
  auto chase_upper = [&](std::size_t r, std::size_t c) {
    const S tau = ratio(m(r, c), m(r, c - 1), c);
    cols_combine(m, c, c - 1, -tau);
    cols_combine(v, c, c - 1, -tau);
    m(r, c) = S(0);
    rows_combine(m, c - 1, c, tau);
    rows_combine(wt, c - 1, c, tau);
  };

  // Sweep 1: clear the deepest coordinate entries, then rebiorthogonalize.
  row_elim(p, q, n - 1);
  row_elim(p, q, n - 2);
  row_elim(q, p, n - 1);
  col_elim(n - 1);
  lu_biorth();

  // Middle sweeps: one new zero per vector, then the bulges are chased in
  // lower/upper pairs down the band.
  for (std::size_t i = 2; i + 2 <= n; ++i) {
    row_elim(p, q, n - i - 1);
    row_elim(q, p, n - i);
    col_elim(n - i);
    lu_biorth();
    for (std::size_t j = 0; j + 2 <= i; ++j) {
      chase_lower(n - i + 1 + j, n - i - 1 + j);
      chase_upper(n - i - 2 + j, n - i + 1 + j);
    }
  }

  // Last sweep: one upward elimination brings q onto e1 (p and s follow for
  // free), leaving a subdiagonal bulge train that a lower chase clears.
  {
    const S tau = -ratio(q[0], q[1], 0);
    q[0] = S(0);
    p[0] += tau * p[1];
    s[1] = S(0);  // the paired column update lands it on zero exactly
    rows_combine(m, 1, 0, -tau);
    rows_combine(wt, 1, 0, -tau);
    cols_combine(m, 0, 1, tau);
    cols_combine(v, 0, 1, tau);
    for (std::size_t j = 0; j + 3 <= n; ++j) chase_lower(j + 2, j);
  }

  // Final diagonal scaling normalizes the starting coordinates to exact
  // unit vectors.
  {
    const S p0 = p[0], q1 = q[1];
    if (p0 == S(0) || q1 == S(0) || !scalar_traits<S>::finite(p0) ||
        !scalar_traits<S>::finite(q1))
      throw solver_error(errc::chase_pivot, "starting coordinate collapsed to zero", 0);
    const A p0a(p0), q1a(q1);
    for (std::size_t k = 0; k < n; ++k) {
      m(0, k) *= p0;
      m(1, k) *= q1;
      wt(0, k) *= p0a;
      wt(1, k) *= q1a;
    }
    for (std::size_t k = 0; k < n; ++k) {
      m(k, 0) /= p0;
      m(k, 1) /= q1;
      v(k, 0) /= p0a;
      v(k, 1) /= q1a;
    }
    p.assign(n, S(0));
    q.assign(n, S(0));
    p[0] = S(1);
    q[1] = S(1);
    s[0] *= p0;
  }

  BandedHessenberg<S> pre = BandedHessenberg<S>::from_dense(m);
  SolveResult<S> out;
  out.h = monic_rescale(pre);
  out.h_basis = std::move(pre);
  if constexpr (std::is_same_v<A, S>) {
    out.w = transpose(wt);
    out.v = std::move(v);
  } else {
    Matrix<S> ws(n, n), vs(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        ws(c, r) = scalar_convert<S>(wt(r, c));
        vs(r, c) = scalar_convert<S>(v(r, c));
      }
    out.w = std::move(ws);
    out.v = std::move(vs);
  }
  return out;
}

}  // namespace mop
