#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>

#include "mop/linalg.hpp"

namespace mop {

// A pair of discrete measures sharing one node set: the inner products are
// <f, g>_j = sum_i f(z_i) g(z_i) weights_j[i].
template <class S>
struct DiscreteSystem {
  Vector<S> nodes;
  Vector<S> weights1;
  Vector<S> weights2;

  std::size_t size() const { return nodes.size(); }
};

template <class S>
void validate_system(const DiscreteSystem<S>& sys) {
  const std::size_t n = sys.size();
  if (n < 3)
    throw solver_error(errc::validation, "need at least three nodes");
  if (sys.weights1.size() != n || sys.weights2.size() != n)
    throw solver_error(errc::validation, "weight vectors must match the node count");
  for (const auto& z : sys.nodes)
    if (!scalar_traits<S>::finite(z))
      throw solver_error(errc::validation, "non-finite node");
  for (const auto& w : sys.weights1)
    if (!scalar_traits<S>::finite(w))
      throw solver_error(errc::validation, "non-finite weight");
  for (const auto& w : sys.weights2)
    if (!scalar_traits<S>::finite(w))
      throw solver_error(errc::validation, "non-finite weight");
  // Exact-equality duplicate scan over a sorted view.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sys.nodes[a] < sys.nodes[b];
  });
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (sys.nodes[order[i]] == sys.nodes[order[i + 1]])
      throw solver_error(errc::validation, "duplicate node",
                         static_cast<std::ptrdiff_t>(order[i + 1]));
}

// Pointwise multiplication by the node values: the matrix Z applied to a
// vector sampled on the nodes.
template <class S>
Vector<S> node_multiply(const DiscreteSystem<S>& sys, const Vector<S>& x) {
  Vector<S> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sys.nodes[i] * x[i];
  return y;
}

// -- measure families ---------------------------------------------------------

// Weights p^x (1-p)^(n-x) on x = 0..n-1; the variant multiplies in the
// binomial coefficient C(n-1, x).  Ratio updates keep exact kinds exact.
template <class S>
Vector<S> kravchuk_weights(std::size_t n, const S& p, bool binomial_variant = false) {
  const S q = S(1) - p;
  if (p == S(0) || q == S(0))
    throw solver_error(errc::validation, "success probability must lie strictly inside (0, 1)");
  Vector<S> w(n);
  S cur = q;
  for (std::size_t i = 1; i < n; ++i) cur *= q;  // q^n
  w[0] = cur;
  for (std::size_t x = 0; x + 1 < n; ++x) {
    S ratio = p / q;
    if (binomial_variant)
      ratio *= S(static_cast<int>(n - 1 - x)) / S(static_cast<int>(x + 1));
    w[x + 1] = w[x] * ratio;
  }
  return w;
}

// Weights with w_0 = prod_{i=1}^{n-1} (g+i)/i and the ladder
// w_{x+1}/w_x = ((b+1+x)/(x+1)) * ((n-1-x)/(g+n-1-x)).
template <class S>
Vector<S> hahn_weights(std::size_t n, const S& b, const S& g) {
  Vector<S> w(n);
  S head(1);
  for (std::size_t i = 1; i < n; ++i) head *= (g + S(static_cast<int>(i))) / S(static_cast<int>(i));
  w[0] = head;
  for (std::size_t x = 0; x + 1 < n; ++x) {
    S xi = S(static_cast<int>(x));
    S num = (b + S(1) + xi) * S(static_cast<int>(n - 1 - x));
    S den = (xi + S(1)) * (g + S(static_cast<int>(n - 1 - x)));
    if (den == S(0))
      throw solver_error(errc::validation, "weight ladder hit a zero denominator",
                         static_cast<std::ptrdiff_t>(x));
    w[x + 1] = w[x] * num / den;
  }
  return w;
}

template <class S>
DiscreteSystem<S> make_kravchuk_system(std::size_t n, const S& p1, const S& p2,
                                       bool binomial_variant = false) {
  DiscreteSystem<S> sys;
  sys.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.nodes[i] = S(static_cast<int>(i));
  sys.weights1 = kravchuk_weights(n, p1, binomial_variant);
  sys.weights2 = kravchuk_weights(n, p2, binomial_variant);
  return sys;
}

template <class S>
DiscreteSystem<S> make_hahn_system(std::size_t n, const S& b1, const S& b2, const S& g) {
  DiscreteSystem<S> sys;
  sys.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.nodes[i] = S(static_cast<int>(i));
  sys.weights1 = hahn_weights(n, b1, g);
  sys.weights2 = hahn_weights(n, b2, g);
  return sys;
}

// Synthetic systems are defined in double (nodes and i.i.d. uniform-[1,2)
// weights) and lifted into the requested kind, so every kind sees the same
// data and exact reference runs reproduce the floating problem bit for bit.
template <class S>
DiscreteSystem<S> make_equidistant_system(std::size_t n, std::uint64_t seed,
                                          std::uint64_t run = 0) {
  DiscreteSystem<S> sys;
  sys.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    sys.nodes[i] = scalar_convert<S>(z);
  }
  xorshift64star g1(derive_seed(seed, run, 0)), g2(derive_seed(seed, run, 1));
  sys.weights1.resize(n);
  sys.weights2.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.weights1[i] = scalar_convert<S>(g1.next_weight());
  for (std::size_t i = 0; i < n; ++i) sys.weights2[i] = scalar_convert<S>(g2.next_weight());
  return sys;
}

template <class S>
DiscreteSystem<S> make_chebyshev_system(std::size_t n, std::uint64_t seed,
                                        std::uint64_t run = 0) {
  DiscreteSystem<S> sys;
  sys.nodes.resize(n);
  const double pi = std::acos(-1.0);
  for (std::size_t i = 0; i < n; ++i) {
    // k = n-1-i makes the sequence ascending.
    double z = std::cos((2.0 * static_cast<double>(n - 1 - i) + 1.0) * pi /
                        (2.0 * static_cast<double>(n)));
    sys.nodes[i] = scalar_convert<S>(z);
  }
  xorshift64star g1(derive_seed(seed, run, 0)), g2(derive_seed(seed, run, 1));
  sys.weights1.resize(n);
  sys.weights2.resize(n);
  for (std::size_t i = 0; i < n; ++i) sys.weights1[i] = scalar_convert<S>(g1.next_weight());
  for (std::size_t i = 0; i < n; ++i) sys.weights2[i] = scalar_convert<S>(g2.next_weight());
  return sys;
}

// -- starting data -------------------------------------------------------------

// First columns of the two bases plus the mass/centering constants tying the
// recurrence back to the measures: w1 = a1/d1, v1 = 1, and w2 the first
// measure-2 vector made biorthogonal to v1 and normalized against Z v1.
template <class S>
struct StartingVectors {
  Vector<S> w1, w2, v1;
  S d1, d2, d3;
  S mean;  // first-moment ratio of measure 1, centers the measure-2 column
};

template <class S>
StartingVectors<S> starting_vectors(const DiscreteSystem<S>& sys) {
  const std::size_t n = sys.size();
  StartingVectors<S> sv;
  sv.d1 = S(0);
  for (const auto& w : sys.weights1) sv.d1 += w;
  S mass_scale(0);
  for (const auto& w : sys.weights1) mass_scale += scalar_traits<S>::abs(w);
  const S tol1 = S(1000) * scalar_traits<S>::epsilon() * mass_scale;
  if (scalar_traits<S>::abs(sv.d1) <= tol1)
    throw solver_error(errc::degenerate, "measure 1 has (near-)zero total mass");

  sv.w1.resize(n);
  for (std::size_t i = 0; i < n; ++i) sv.w1[i] = sys.weights1[i] / sv.d1;
  sv.v1.assign(n, S(1));

  sv.d2 = S(0);
  for (const auto& w : sys.weights2) sv.d2 += w;

  S zmass(0);
  for (std::size_t i = 0; i < n; ++i) zmass += sys.nodes[i] * sys.weights1[i];
  sv.mean = zmass / sv.d1;

  sv.d3 = S(0);
  S centered_scale(0);
  for (std::size_t i = 0; i < n; ++i) {
    S c = (sys.nodes[i] - sv.mean) * sys.weights2[i];
    sv.d3 += c;
    centered_scale += scalar_traits<S>::abs(c);
  }
  const S tol3 = S(1000) * scalar_traits<S>::epsilon() * centered_scale;
  if (scalar_traits<S>::abs(sv.d3) <= tol3)
    throw solver_error(errc::degenerate,
                       "measure 2 is centered: no valid second starting column");

  sv.w2.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sv.w2[i] = (sys.weights2[i] - sv.d2 * sv.w1[i]) / sv.d3;
  return sv;
}

// -- normality ------------------------------------------------------------------

// The recurrence of length n exists iff every leading mixed moment block is
// nonsingular.  Block n stacks Hankel rows of measure-1 power moments
// (ceil(n/2) of them) over measure-2 rows (floor(n/2)), columns t = 0..n-1.
template <class S>
bool check_normality(const DiscreteSystem<S>& sys, std::size_t upto = 0) {
  const std::size_t n = sys.size();
  if (upto == 0 || upto > n) upto = n;
  const std::size_t top = (upto + 1) / 2 + upto;  // largest k + t needed, plus slack
  Vector<S> m1(top, S(0)), m2(top, S(0));
  Vector<S> pw(n, S(1));
  for (std::size_t l = 0; l < top; ++l) {
    for (std::size_t i = 0; i < n; ++i) {
      m1[l] += pw[i] * sys.weights1[i];
      m2[l] += pw[i] * sys.weights2[i];
      pw[i] *= sys.nodes[i];
    }
  }
  for (std::size_t blk = 1; blk <= upto; ++blk) {
    const std::size_t r1 = (blk + 1) / 2;
    Matrix<S> m(blk, blk);
    for (std::size_t k = 0; k < blk; ++k)
      for (std::size_t t = 0; t < blk; ++t)
        m(k, t) = k < r1 ? m1[k + t] : m2[(k - r1) + t];
    if (elimination_rank(std::move(m)) < blk) return false;
  }
  return true;
}

// -- polynomial evaluation helpers ---------------------------------------------

template <class S>
S pochhammer(const S& a, std::size_t k) {
  S r(1);
  for (std::size_t i = 0; i < k; ++i) r *= a + S(static_cast<int>(i));
  return r;
}

// Closed-form monic polynomial of multi-degree (n1, n2) for the binomial
// weight pair on 0..nref:  p1^n1 p2^n2 (-nref-1)_(n1+n2) * double sum of
// Pochhammer ratios.  Degree (1,0) collapses to x - p1*(nref+1).
template <class S>
S kravchuk_typeII_eval(std::size_t n1, std::size_t n2, std::size_t nref,
                       const S& p1, const S& p2, const S& x) {
  const std::size_t deg = n1 + n2;
  const S a = -S(static_cast<int>(nref)) - S(1);  // (-nref-1)
  S sum(0);
  for (std::size_t j = 0; j <= deg; ++j) {
    const S xfall = pochhammer(-x, j);
    const S aden = pochhammer(a, j);
    if (aden == S(0)) break;  // deeper terms vanish against the prefactor
    for (std::size_t k = 0; k <= j; ++k) {
      if (k > n1 || j - k > n2) continue;  // Pochhammer of negative integer cut off
      S term = pochhammer(-S(static_cast<int>(n1)), k);
      for (std::size_t i = 1; i <= k; ++i) term /= S(static_cast<int>(i));
      S t2 = pochhammer(-S(static_cast<int>(n2)), j - k);
      for (std::size_t i = 1; i <= j - k; ++i) t2 /= S(static_cast<int>(i));
      S pw1(1), pw2(1);
      for (std::size_t i = 0; i < k; ++i) pw1 *= p1;
      for (std::size_t i = 0; i < j - k; ++i) pw2 *= p2;
      sum += term * t2 * (xfall / aden) / (pw1 * pw2);
    }
  }
  S pref = pochhammer(a, deg);
  for (std::size_t i = 0; i < n1; ++i) pref *= p1;
  for (std::size_t i = 0; i < n2; ++i) pref *= p2;
  return pref * sum;
}

// -- banded recurrence matrix ----------------------------------------------------

// Upper Hessenberg with two superdiagonals: the step-line recurrence
//   z p_k(z) = p_{k+1}(z)*sub + p_k(z)*diag + p_{k-1}(z)*super1 + p_{k-2}(z)*super2.
// Stored by diagonals; sub[i] = H(i+1, i), super1[i] = H(i, i+1),
// super2[i] = H(i, i+2).
template <class S>
struct BandedHessenberg {
  Vector<S> sub;
  Vector<S> diag;
  Vector<S> super1;
  Vector<S> super2;

  std::size_t size() const { return diag.size(); }

  static BandedHessenberg zero(std::size_t n) {
    BandedHessenberg h;
    h.sub.assign(n - 1, S(0));
    h.diag.assign(n, S(0));
    h.super1.assign(n - 1, S(0));
    h.super2.assign(n - 2, S(0));
    return h;
  }

  bool monic() const {
    for (const auto& s : sub)
      if (s != S(1)) return false;
    return true;
  }

  Matrix<S> to_dense() const {
    const std::size_t n = size();
    Matrix<S> m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = diag[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      m(i + 1, i) = sub[i];
      m(i, i + 1) = super1[i];
    }
    for (std::size_t i = 0; i + 2 < n; ++i) m(i, i + 2) = super2[i];
    return m;
  }

  // Inverse of to_dense; entries outside the band must be exactly zero
  // (solver eliminations produce literal zeros there, so any residue is a
  // structural failure, not roundoff).
  static BandedHessenberg from_dense(const Matrix<S>& m) {
    const std::size_t n = m.rows();
    if (n < 3 || m.cols() != n)
      throw solver_error(errc::validation, "band extraction needs a square matrix, 3x3 or larger");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if ((j + 1 < i || j > i + 2) && m(i, j) != S(0))
          throw solver_error(errc::validation, "nonzero entry outside the recurrence band",
                             static_cast<std::ptrdiff_t>(i));
    BandedHessenberg h = zero(n);
    for (std::size_t i = 0; i < n; ++i) h.diag[i] = m(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h.sub[i] = m(i + 1, i);
      h.super1[i] = m(i, i + 1);
    }
    for (std::size_t i = 0; i + 2 < n; ++i) h.super2[i] = m(i, i + 2);
    return h;
  }
};

template <class S>
Vector<S> hessenberg_matvec(const BandedHessenberg<S>& h, const Vector<S>& x) {
  const std::size_t n = h.size();
  Vector<S> y(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    S s(0);
    if (i > 0) s += h.sub[i - 1] * x[i - 1];
    s += h.diag[i] * x[i];
    if (i + 1 < n) s += h.super1[i] * x[i + 1];
    if (i + 2 < n) s += h.super2[i] * x[i + 2];
    y[i] = s;
  }
  return y;
}

template <class S>
Vector<S> hessenberg_matTvec(const BandedHessenberg<S>& h, const Vector<S>& x) {
  const std::size_t n = h.size();
  Vector<S> y(n, S(0));
  for (std::size_t i = 0; i < n; ++i) {
    S s(0);
    if (i + 1 < n) s += h.sub[i] * x[i + 1];
    s += h.diag[i] * x[i];
    if (i > 0) s += h.super1[i - 1] * x[i - 1];
    if (i > 1) s += h.super2[i - 2] * x[i - 2];
    y[i] = s;
  }
  return y;
}

// Diagonal similarity turning the subdiagonal into ones without touching the
// bases: diag stays, super1 picks up one subdiagonal factor, super2 two.
template <class S>
BandedHessenberg<S> monic_rescale(const BandedHessenberg<S>& h) {
  const std::size_t n = h.size();
  BandedHessenberg<S> r = h;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (h.sub[i] == S(0))
      throw solver_error(errc::breakdown, "zero subdiagonal blocks the monic form",
                         static_cast<std::ptrdiff_t>(i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    r.sub[i] = S(1);
    r.super1[i] = h.sub[i] * h.super1[i];
  }
  for (std::size_t i = 0; i + 2 < n; ++i) r.super2[i] = h.sub[i] * h.sub[i + 1] * h.super2[i];
  return r;
}

}  // namespace mop
