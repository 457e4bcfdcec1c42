#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using mop::errc;
using mop::Rational;
using mop::Vector;
using fx::q;

TEST_CASE("starting vectors of the three-point system, exactly") {
  const auto sys = fx::s3<Rational>();
  const mop::StartingVectors<Rational> sv = mop::starting_vectors(sys);

  CHECK(sv.d1 == Rational(3));
  CHECK(sv.d2 == Rational(4));
  CHECK(sv.d3 == Rational(-1));
  CHECK(sv.mean == Rational(1));
  CHECK(sv.w1 == Vector<Rational>{q<Rational>(1, 3), q<Rational>(1, 3), q<Rational>(1, 3)});
  CHECK(sv.w2 == Vector<Rational>{q<Rational>(-2, 3), q<Rational>(1, 3), q<Rational>(1, 3)});
  CHECK(sv.v1 == Vector<Rational>{Rational(1), Rational(1), Rational(1)});

  // Defining identities: w1^T v1 = 1, w2^T v1 = 0, w2^T Z v1 = 1.
  const Vector<Rational> zv1 = mop::node_multiply(sys, sv.v1);
  CHECK(mop::dot(sv.w1, sv.v1) == Rational(1));
  CHECK(mop::dot(sv.w2, sv.v1) == Rational(0));
  CHECK(mop::dot(sv.w2, zv1) == Rational(1));
}

TEST_CASE("zero-mass and centered measures are rejected as degenerate") {
  auto zero_mass = fx::s3<Rational>();
  zero_mass.weights1 = {Rational(1), Rational(-2), Rational(1)};
  CHECK(fx::capture_error([&] { mop::starting_vectors(zero_mass); }).kind() == errc::degenerate);

  // weights2 symmetric about the measure-1 mean node: d3 = 0.
  auto centered = fx::s3<Rational>();
  centered.weights2 = {Rational(1), Rational(5), Rational(1)};
  CHECK(fx::capture_error([&] { mop::starting_vectors(centered); }).kind() == errc::degenerate);
}

TEST_CASE("binomial-type weight ladders in exact arithmetic") {
  const Rational p = q<Rational>(2, 5);

  const Vector<Rational> plain = mop::kravchuk_weights(3, p);
  CHECK(plain == Vector<Rational>{q<Rational>(27, 125), q<Rational>(18, 125), q<Rational>(12, 125)});

  const Vector<Rational> withbinom = mop::kravchuk_weights(3, p, /*binomial_variant=*/true);
  CHECK(withbinom ==
        Vector<Rational>{q<Rational>(27, 125), q<Rational>(36, 125), q<Rational>(12, 125)});

  const Vector<Rational> hahn = mop::hahn_weights(3, Rational(1), Rational(1));
  CHECK(hahn == Vector<Rational>{Rational(3), Rational(4), Rational(3)});

  CHECK(fx::capture_error([&] { mop::kravchuk_weights(3, Rational(1)); }).kind() ==
        errc::validation);  // p must lie strictly inside (0, 1)
}

TEST_CASE("block nonsingularity of the measure pair") {
  CHECK(mop::check_normality(fx::s3<Rational>()));
  // weights2 = (1 + z) * weights1 makes the third block row-dependent.
  CHECK_FALSE(mop::check_normality(fx::s3_dependent<Rational>()));

  // The failing block, written out: rows are measure-1 moments (2 Hankel
  // rows) over one measure-2 row; the third row is the sum of the first two.
  mop::Matrix<Rational> blk(3, 3);
  const int m1[4] = {3, 3, 5, 9};
  const int m2[3] = {6, 8, 14};
  for (int t = 0; t < 3; ++t) {
    blk(0, t) = Rational(m1[t]);
    blk(1, t) = Rational(m1[t + 1]);
    blk(2, t) = Rational(m2[t]);
  }
  CHECK(mop::elimination_rank(blk) == 2);
}

TEST_CASE("band storage round-trips through dense form") {
  const auto h = fx::h3<Rational>();
  const mop::Matrix<Rational> dense = h.to_dense();
  CHECK(dense(1, 0) == Rational(1));
  CHECK(dense(0, 2) == q<Rational>(2, 9));
  CHECK(dense(2, 0) == Rational(0));
  const auto back = mop::BandedHessenberg<Rational>::from_dense(dense);
  CHECK(fx::band_diff(back, h) == 0.0);

  mop::Matrix<Rational> bad = dense;
  bad(2, 0) = Rational(1);
  CHECK(fx::capture_error([&] { mop::BandedHessenberg<Rational>::from_dense(bad); }).kind() ==
        errc::validation);
}

TEST_CASE("monic rescale pushes subdiagonal scales up the band") {
  mop::BandedHessenberg<Rational> h;
  h.sub = {Rational(2), q<Rational>(1, 2)};
  h.diag = {Rational(5), Rational(6), Rational(7)};
  h.super1 = {Rational(1), Rational(1)};
  h.super2 = {Rational(1)};
  const auto m = mop::monic_rescale(h);
  CHECK(m.sub == Vector<Rational>{Rational(1), Rational(1)});
  CHECK(m.diag == h.diag);  // diagonal is similarity-invariant
  CHECK(m.super1 == Vector<Rational>{Rational(2), q<Rational>(1, 2)});
  CHECK(m.super2 == Vector<Rational>{Rational(1)});  // 2 * 1/2 * 1

  mop::BandedHessenberg<Rational> dead = h;
  dead.sub[1] = Rational(0);
  CHECK(fx::capture_error([&] { mop::monic_rescale(dead); }).kind() == errc::breakdown);
}

TEST_CASE("banded matvec pair agrees with the dense matrix") {
  const auto h = fx::h3<Rational>();
  const auto dense = h.to_dense();
  const Vector<Rational> x{Rational(1), Rational(-2), Rational(3)};
  CHECK(mop::hessenberg_matvec(h, x) == mop::matvec(dense, x));
  CHECK(mop::hessenberg_matTvec(h, x) == mop::matTvec(dense, x));
}

TEST_CASE("closed-form evaluation collapses at multi-degree (1,0)") {
  const Rational p1 = q<Rational>(2, 5), p2 = q<Rational>(1, 2);
  for (int x = 0; x <= 4; ++x) {
    // With nref = 4:  x - p1 * (nref + 1) = x - 2.
    CHECK(mop::kravchuk_typeII_eval<Rational>(1, 0, 4, p1, p2, Rational(x)) == Rational(x - 2));
  }
  CHECK(mop::pochhammer(Rational(3), 0) == Rational(1));
  CHECK(mop::pochhammer(Rational(3), 3) == Rational(60));  // 3*4*5
}

TEST_CASE("system validation rejects malformed data") {
  auto dup = fx::s3<double>();
  dup.nodes[2] = dup.nodes[0];
  CHECK(fx::capture_error([&] { mop::validate_system(dup); }).kind() == errc::validation);

  auto bad = fx::s3<double>();
  bad.weights2[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK(fx::capture_error([&] { mop::validate_system(bad); }).kind() == errc::validation);

  mop::DiscreteSystem<double> small;
  small.nodes = {0.0, 1.0};
  small.weights1 = {1.0, 1.0};
  small.weights2 = {1.0, 1.0};
  CHECK(fx::capture_error([&] { mop::validate_system(small); }).kind() == errc::validation);
}

TEST_CASE("synthetic systems are deterministic and within bounds") {
  const auto a = mop::make_equidistant_system<double>(20, 7);
  const auto b = mop::make_equidistant_system<double>(20, 7);
  CHECK(a.nodes == b.nodes);
  CHECK(a.weights1 == b.weights1);
  CHECK(a.weights2 == b.weights2);
  CHECK(a.nodes.front() == -1.0);
  CHECK(a.nodes.back() == 1.0);
  for (double w : a.weights1) CHECK((w >= 1.0 && w < 2.0));

  const auto c = mop::make_chebyshev_system<double>(20, 7);
  for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i) CHECK(c.nodes[i] < c.nodes[i + 1]);
  for (double z : c.nodes) CHECK((z > -1.0 && z < 1.0));
  // Different weight streams for the two measures.
  CHECK(c.weights1 != c.weights2);

  const auto d = mop::make_chebyshev_system<double>(20, 8);
  CHECK(c.weights1 != d.weights1);  // seed matters

  // The lifted rational system reproduces the double data bit for bit.
  const auto lifted = mop::make_equidistant_system<Rational>(20, 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(lifted.nodes[i].to_double() == a.nodes[i]);
    CHECK(lifted.weights1[i].to_double() == a.weights1[i]);
  }
}
