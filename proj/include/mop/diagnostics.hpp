#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <type_traits>

#include "mop/coretrans.hpp"
#include "mop/krylov.hpp"
#include "mop/model.hpp"
#include "mop/moments.hpp"

namespace mop {

template <class To, class From>
DiscreteSystem<To> lift_system(const DiscreteSystem<From>& sys) {
  DiscreteSystem<To> out;
  out.nodes.reserve(sys.size());
  out.weights1.reserve(sys.size());
  out.weights2.reserve(sys.size());
  for (const auto& x : sys.nodes) out.nodes.push_back(scalar_convert<To>(x));
  for (const auto& x : sys.weights1) out.weights1.push_back(scalar_convert<To>(x));
  for (const auto& x : sys.weights2) out.weights2.push_back(scalar_convert<To>(x));
  return out;
}

template <class S>
BandedHessenberg<double> band_to_double(const BandedHessenberg<S>& h) {
  BandedHessenberg<double> out;
  auto conv = [](const Vector<S>& src, Vector<double>& dst) {
    dst.reserve(src.size());
    for (const auto& x : src) dst.push_back(scalar_traits<S>::to_double(x));
  };
  conv(h.sub, out.sub);
  conv(h.diag, out.diag);
  conv(h.super1, out.super1);
  conv(h.super2, out.super2);
  return out;
}

// Largest singular value of a banded matrix by power iteration on A^T A,
// never forming the dense matrix.
inline double spectral_norm_banded(const BandedHessenberg<double>& h,
                                   double rel_tol = 1e-10, int max_iter = 10000) {
  const std::size_t n = h.size();
  xorshift64star rng(0x5eedULL);
  Vector<double> v(n);
  for (auto& x : v) x = rng.next_symmetric();
  double nv = norm_euclid(v);
  if (nv == 0.0) v[0] = 1.0; else scale(v, 1.0 / nv);
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector<double> w = hessenberg_matvec(h, v);
    double s = norm_euclid(w);
    if (s == 0.0) return 0.0;
    Vector<double> u = hessenberg_matTvec(h, w);
    double nu = norm_euclid(u);
    if (nu == 0.0) return s;
    scale(u, 1.0 / nu);
    v = std::move(u);
    double diff = std::fabs(s - sigma);
    sigma = s;
    if (it > 0 && diff <= rel_tol * sigma) break;
  }
  return sigma;
}

// Relative spectral-norm distance between two recurrence matrices, measured
// in double regardless of the source kind.
template <class SA, class SB>
double forward_error(const BandedHessenberg<SA>& h, const BandedHessenberg<SB>& ref) {
  BandedHessenberg<double> a = band_to_double(h);
  const BandedHessenberg<double> b = band_to_double(ref);
  const std::size_t n = a.size();
  if (b.size() != n)
    throw solver_error(errc::validation, "size mismatch between recurrence matrices");
  for (std::size_t i = 0; i < n; ++i) a.diag[i] -= b.diag[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a.sub[i] -= b.sub[i];
    a.super1[i] -= b.super1[i];
  }
  for (std::size_t i = 0; i + 2 < n; ++i) a.super2[i] -= b.super2[i];
  return spectral_norm_banded(a) / spectral_norm_banded(b);
}

// Departure from biorthogonality ||W^T V - I||_2, in double.
template <class S>
double biorth_loss(const Matrix<S>& w, const Matrix<S>& v) {
  const std::size_t n = w.cols();
  Matrix<double> wd(w.rows(), n), vd(v.rows(), n);
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      wd(i, j) = scalar_traits<S>::to_double(w(i, j));
      vd(i, j) = scalar_traits<S>::to_double(v(i, j));
    }
  Matrix<double> g = matmul(transpose(wd), vd);
  for (std::size_t i = 0; i < n; ++i) g(i, i) -= 1.0;
  return spectral_norm(g);
}

// The same loss after absorbing the best diagonal rebalancing: columns of
// both bases normalized and the product's diagonal divided out, so pure
// scale drift does not count.
template <class S>
double biorth_loss_scaled(const Matrix<S>& w, const Matrix<S>& v) {
  const std::size_t n = w.cols();
  Matrix<double> wd(w.rows(), n), vd(v.rows(), n);
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) {
      wd(i, j) = scalar_traits<S>::to_double(w(i, j));
      vd(i, j) = scalar_traits<S>::to_double(v(i, j));
    }
  for (std::size_t j = 0; j < n; ++j) {
    double nw = norm_euclid(wd.col(j)), nv = norm_euclid(vd.col(j));
    if (nw == 0.0 || nv == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < wd.rows(); ++i) wd(i, j) /= nw;
    for (std::size_t i = 0; i < vd.rows(); ++i) vd(i, j) /= nv;
  }
  Matrix<double> g = matmul(transpose(wd), vd);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = g(i, i);
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) g(i, j) /= d;
    g(i, i) = 0.0;
  }
  return spectral_norm(g);
}

// Values and derivatives of the monic step-line polynomials at x:
//   p_{k+1} = (x - diag_k) p_k - super1_{k-1} p_{k-1} - super2_{k-2} p_{k-2},
// returned for degrees 0..n.
template <class S>
struct PolyEval {
  Vector<S> value;
  Vector<S> deriv;
};

template <class S>
PolyEval<S> eval_typeII(const BandedHessenberg<S>& h, const S& x) {
  if (!h.monic())
    throw solver_error(errc::validation, "polynomial evaluation needs the monic form");
  const std::size_t n = h.size();
  PolyEval<S> e;
  e.value.assign(n + 1, S(0));
  e.deriv.assign(n + 1, S(0));
  e.value[0] = S(1);
  for (std::size_t k = 0; k < n; ++k) {
    const S xb = x - h.diag[k];
    S val = xb * e.value[k];
    S der = e.value[k] + xb * e.deriv[k];
    if (k >= 1) {
      val -= h.super1[k - 1] * e.value[k - 1];
      der -= h.super1[k - 1] * e.deriv[k - 1];
    }
    if (k >= 2) {
      val -= h.super2[k - 2] * e.value[k - 2];
      der -= h.super2[k - 2] * e.deriv[k - 2];
    }
    e.value[k + 1] = val;
    e.deriv[k + 1] = der;
  }
  return e;
}

// Roots of the degree-n polynomial by safeguarded Newton from the supplied
// starting points (halve the step while the residual grows), tolerance
// 1e-14 * (1 + |x|) on the accepted step, at most 100 iterations per root.
// Results are sorted; two roots landing on the same point is an error.
template <class S>
Vector<S> recover_nodes(const BandedHessenberg<S>& h, const Vector<S>& guesses) {
  const std::size_t n = h.size();
  if (guesses.size() != n)
    throw solver_error(errc::validation, "need one starting point per root");
  const S step_tol = scalar_traits<S>::from_double(1e-14);
  const S collide_tol = scalar_traits<S>::from_double(1e-12);
  Vector<S> roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    S x = guesses[i];
    bool done = false;
    for (int it = 0; it < 100 && !done; ++it) {
      const PolyEval<S> e = eval_typeII(h, x);
      const S pv = e.value[n];
      if (pv == S(0)) { done = true; break; }
      const S dv = e.deriv[n];
      if (dv == S(0))
        throw solver_error(errc::non_convergence, "stationary point under the root iteration",
                           static_cast<std::ptrdiff_t>(i));
      S step = pv / dv;
      S trial = x - step;
      S mag = scalar_traits<S>::abs(pv);
      for (int halves = 0; halves < 60; ++halves) {
        const S tmag = scalar_traits<S>::abs(eval_typeII(h, trial).value[n]);
        if (tmag < mag) break;
        step /= S(2);
        trial = x - step;
      }
      x = trial;
      if (scalar_traits<S>::abs(step) <= step_tol * (S(1) + scalar_traits<S>::abs(x)))
        done = true;
    }
    if (!done)
      throw solver_error(errc::non_convergence, "root iteration exhausted its budget",
                         static_cast<std::ptrdiff_t>(i));
    roots[i] = x;
  }
  std::sort(roots.begin(), roots.end());
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (scalar_traits<S>::abs(roots[i + 1] - roots[i]) <=
        collide_tol * (S(1) + scalar_traits<S>::abs(roots[i])))
      throw solver_error(errc::root_collision, "two roots collapsed onto one point",
                         static_cast<std::ptrdiff_t>(i));
  return roots;
}

// Weights reproducing the first two rows of the inverse basis: with
// B(i, j) = p_j(root_i), solve B^T u = e0 and B^T u' = e1; the measure
// weights are d1 u and d2 u + d3 u' with the constants of the original data.
template <class S>
struct RecoveredSystem {
  Vector<S> nodes;
  Vector<S> weights1;
  Vector<S> weights2;
};

template <class S>
RecoveredSystem<S> recover_system(const DiscreteSystem<S>& original,
                                  const BandedHessenberg<S>& h) {
  const std::size_t n = h.size();
  const StartingVectors<S> sv = starting_vectors(original);
  RecoveredSystem<S> rec;
  rec.nodes = recover_nodes(h, original.nodes);
  Matrix<S> bt(n, n);  // B^T directly: bt(j, i) = p_j(root_i)
  for (std::size_t i = 0; i < n; ++i) {
    const PolyEval<S> e = eval_typeII(h, rec.nodes[i]);
    for (std::size_t j = 0; j < n; ++j) bt(j, i) = e.value[j];
  }
  Vector<S> e0(n, S(0)), e1(n, S(0));
  e0[0] = S(1);
  e1[1] = S(1);
  const Vector<S> u = solve_pivoted(bt, e0);
  const Vector<S> up = solve_pivoted(std::move(bt), std::move(e1));
  rec.weights1.resize(n);
  rec.weights2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rec.weights1[i] = sv.d1 * u[i];
    rec.weights2[i] = sv.d2 * u[i] + sv.d3 * up[i];
  }
  return rec;
}

struct BackwardReport {
  double nodes;
  double weights1;
  double weights2;
};

namespace detail {

template <class S>
double rel_max_err(const Vector<S>& got, const Vector<S>& want) {
  S err(0), mag(0);
  for (std::size_t i = 0; i < got.size(); ++i) {
    S d = scalar_traits<S>::abs(got[i] - want[i]);
    S m = scalar_traits<S>::abs(want[i]);
    if (err < d) err = d;
    if (mag < m) mag = m;
  }
  if (mag == S(0)) return err == S(0) ? 0.0 : std::numeric_limits<double>::infinity();
  return scalar_traits<S>::to_double(err) / scalar_traits<S>::to_double(mag);
}

template <class K>
BackwardReport backward_errors_in(const DiscreteSystem<K>& sys, const BandedHessenberg<K>& h) {
  const RecoveredSystem<K> rec = recover_system(sys, h);
  return {rel_max_err(rec.nodes, sys.nodes), rel_max_err(rec.weights1, sys.weights1),
          rel_max_err(rec.weights2, sys.weights2)};
}

}  // namespace detail

// Data-space residual of a computed recurrence matrix: recover nodes and
// weights from it and compare with the originals (max-norm, relative).
// Double inputs are promoted to the paired kind so the recovery itself does
// not pollute the measurement; exact inputs stay exact end to end.
template <class S>
BackwardReport backward_errors(const DiscreteSystem<S>& sys, const BandedHessenberg<S>& h) {
  if constexpr (std::is_same_v<S, double>) {
    DiscreteSystem<DoubleDouble> ds = lift_system<DoubleDouble>(sys);
    BandedHessenberg<DoubleDouble> dh;
    auto conv = [](const Vector<double>& src, Vector<DoubleDouble>& dst) {
      dst.reserve(src.size());
      for (double x : src) dst.push_back(DoubleDouble(x));
    };
    conv(h.sub, dh.sub);
    conv(h.diag, dh.diag);
    conv(h.super1, dh.super1);
    conv(h.super2, dh.super2);
    return detail::backward_errors_in(ds, dh);
  } else {
    return detail::backward_errors_in(sys, h);
  }
}

// Exact-or-extended reference for double data: small systems are lifted to
// rationals and solved through the moment route; larger ones run the fully
// reorthogonalized variant in the paired kind.
inline BandedHessenberg<double> reference_solve(const DiscreteSystem<double>& sys) {
  if (sys.size() <= 14) {
    DiscreteSystem<Rational> rs = lift_system<Rational>(sys);
    return band_to_double(oracle_solve(rs).h);
  }
  DiscreteSystem<DoubleDouble> ds = lift_system<DoubleDouble>(sys);
  return band_to_double(iep_krylreorth(ds, ReorthWindow::full).h);
}

// Sensitivity probe: max forward error of the reference solutions under a
// handful of random relative perturbations of the data at magnitude
// eps_mag.  The result is the yardstick weak-stability claims are measured
// against (no division by eps_mag).
inline double conditioning_estimate(const DiscreteSystem<double>& sys, double eps_mag = 0x1p-52,
                                    int trials = 5, std::uint64_t seed = 0xC0ED5EEDULL) {
  const BandedHessenberg<double> href = reference_solve(sys);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    DiscreteSystem<double> pert = sys;
    xorshift64star gn(derive_seed(seed, static_cast<std::uint64_t>(t), 0));
    xorshift64star g1(derive_seed(seed, static_cast<std::uint64_t>(t), 1));
    xorshift64star g2(derive_seed(seed, static_cast<std::uint64_t>(t), 2));
    for (auto& z : pert.nodes) z *= 1.0 + eps_mag * gn.next_symmetric();
    for (auto& w : pert.weights1) w *= 1.0 + eps_mag * g1.next_symmetric();
    for (auto& w : pert.weights2) w *= 1.0 + eps_mag * g2.next_symmetric();
    const BandedHessenberg<double> hp = reference_solve(pert);
    worst = std::max(worst, forward_error(hp, href));
  }
  return worst;
}

}  // namespace mop
