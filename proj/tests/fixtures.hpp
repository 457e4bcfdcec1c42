#pragma once

#include <stdexcept>
#include <utility>

#include <mop/mop.hpp>

// Shared hand-checkable fixtures.  The three-point system below is small
// enough that every intermediate of every solver can be verified by hand,
// and all its solver outputs are exact rationals.
namespace fx {

template <class S>
S q(int num, int den = 1) {
  return S(num) / S(den);
}

// nodes (0, 1, 2), measure-1 weights (1, 1, 1), measure-2 weights (2, 1, 1).
template <class S>
mop::DiscreteSystem<S> s3() {
  mop::DiscreteSystem<S> sys;
  sys.nodes = {S(0), S(1), S(2)};
  sys.weights1 = {S(1), S(1), S(1)};
  sys.weights2 = {S(2), S(1), S(1)};
  return sys;
}

// Same nodes, but the second weight vector is (1 + z) times the first, so
// the pair fails the block-nonsingularity condition and no recurrence of
// full length exists.
template <class S>
mop::DiscreteSystem<S> s3_dependent() {
  mop::DiscreteSystem<S> sys;
  sys.nodes = {S(0), S(1), S(2)};
  sys.weights1 = {S(1), S(1), S(1)};
  sys.weights2 = {S(1), S(2), S(3)};
  return sys;
}

// The recurrence matrix of s3(), worked out by hand:
//   diag (1, 2/3, 4/3), super1 (2/3, 2/9), super2 (2/9), unit subdiagonal.
template <class S>
mop::BandedHessenberg<S> h3() {
  mop::BandedHessenberg<S> h;
  h.sub = {S(1), S(1)};
  h.diag = {S(1), q<S>(2, 3), q<S>(4, 3)};
  h.super1 = {q<S>(2, 3), q<S>(2, 9)};
  h.super2 = {q<S>(2, 9)};
  return h;
}

template <class S>
mop::Matrix<S> node_diag(const mop::DiscreteSystem<S>& sys) {
  mop::Matrix<S> z(sys.size(), sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) z(i, i) = sys.nodes[i];
  return z;
}

template <class SA, class SB>
double band_diff(const mop::BandedHessenberg<SA>& a, const mop::BandedHessenberg<SB>& b) {
  const mop::BandedHessenberg<double> da = mop::band_to_double(a);
  const mop::BandedHessenberg<double> db = mop::band_to_double(b);
  double m = 0.0;
  auto acc = [&m](const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
  };
  acc(da.sub, db.sub);
  acc(da.diag, db.diag);
  acc(da.super1, db.super1);
  acc(da.super2, db.super2);
  return m;
}

template <class S>
double mat_diff(const mop::Matrix<S>& a, const mop::Matrix<S>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::fabs(mop::scalar_traits<S>::to_double(a(i, j)) -
                                mop::scalar_traits<S>::to_double(b(i, j))));
  return m;
}

template <class S>
double mat_diff_identity(const mop::Matrix<S>& a) {
  return mat_diff(a, mop::Matrix<S>::identity(a.rows()));
}

// Runs fn expecting a typed solver failure; anything else fails the test.
template <class Fn>
mop::solver_error capture_error(Fn&& fn) {
  try {
    std::forward<Fn>(fn)();
  } catch (const mop::solver_error& e) {
    return e;
  }
  throw std::runtime_error("expected a solver_error, none was thrown");
}

}  // namespace fx
