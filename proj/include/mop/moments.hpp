#pragma once

#include <cstddef>
#include <utility>

#include "mop/krylov.hpp"
#include "mop/model.hpp"

namespace mop {

template <class S>
struct KrylovMatrices {
  Matrix<S> kw;  // columns w1, w2, Z w1, Z w2, Z^2 w1, ...
  Matrix<S> kv;  // columns v1, Z v1, Z^2 v1, ...
};

// Raw two-sided Krylov bases grown from the starting vectors; the w-side
// interleaves the two measure streams to follow the step line.
template <class S>
KrylovMatrices<S> krylov_basis_matrices(const DiscreteSystem<S>& sys) {
  const std::size_t n = sys.size();
  const StartingVectors<S> sv = starting_vectors(sys);
  KrylovMatrices<S> k{Matrix<S>(n, n), Matrix<S>(n, n)};
  Vector<S> col = sv.v1;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) col = node_multiply(sys, col);
    k.kv.set_col(j, col);
  }
  k.kw.set_col(0, sv.w1);
  if (n > 1) k.kw.set_col(1, sv.w2);
  for (std::size_t j = 2; j < n; ++j)
    k.kw.set_col(j, node_multiply(sys, k.kw.col(j - 2)));
  return k;
}

template <class S>
Matrix<S> moment_matrix(const DiscreteSystem<S>& sys) {
  KrylovMatrices<S> k = krylov_basis_matrices(sys);
  return matmul(transpose(k.kw), k.kv);
}

// Reference solve through the mixed moment matrix: factor M = L D U with
// unit-triangular L, U, then V = K_V U^{-1} and W = K_W (L D)^{-T} give a
// biorthogonal pair whose recurrence matrix is the band of W^T Z V.  Exact
// kinds make every step exact; a vanishing leading minor (the data failing
// the existence condition) surfaces as the factorization's typed error.
template <class S>
SolveResult<S> oracle_solve(const DiscreteSystem<S>& sys) {
  validate_system(sys);
  const std::size_t n = sys.size();
  KrylovMatrices<S> k = krylov_basis_matrices(sys);
  Matrix<S> m = matmul(transpose(k.kw), k.kv);
  LDUFactors<S> f = ldu_unpivoted(std::move(m));

  Matrix<S> v = k.kv;
  apply_upper_inverse_right(f.upper, v);  // V = K_V U^{-1}

  // W = K_W (L D)^{-T}: right-apply the unit upper L^T, then divide by D.
  Matrix<S> w = k.kw;
  Matrix<S> lt = transpose(f.lower);
  apply_upper_inverse_right(lt, w);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) w(i, j) /= f.diag[j];

  // Band of W^T Z V, column by column.
  BandedHessenberg<S> pre = BandedHessenberg<S>::zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector<S> zv = node_multiply(sys, v.col(j));
    pre.diag[j] = dot(w.col(j), zv);
    if (j + 1 < n) pre.sub[j] = dot(w.col(j + 1), zv);
    if (j >= 1) pre.super1[j - 1] = dot(w.col(j - 1), zv);
    if (j >= 2) pre.super2[j - 2] = dot(w.col(j - 2), zv);
  }

  SolveResult<S> out;
  out.h = monic_rescale(pre);
  out.h_basis = std::move(pre);
  out.w = std::move(w);
  out.v = std::move(v);
  return out;
}

}  // namespace mop
