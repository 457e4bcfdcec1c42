#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using mop::errc;
using mop::Rational;
using mop::Vector;
using fx::q;

TEST_CASE("two-vector recurrence solve is exact on the three-point system") {
  const auto sys = fx::s3<Rational>();
  const mop::SolveResult<Rational> r = mop::iep_kryl(sys);

  CHECK(fx::band_diff(r.h, fx::h3<Rational>()) == 0.0);
  CHECK(fx::band_diff(r.h_basis, r.h) == 0.0);  // monic route: same matrix

  // Hand-computed basis columns.
  CHECK(r.v.col(0) == Vector<Rational>{Rational(1), Rational(1), Rational(1)});
  CHECK(r.v.col(1) == Vector<Rational>{Rational(-1), Rational(0), Rational(1)});
  CHECK(r.v.col(2) == Vector<Rational>{Rational(0), q<Rational>(-2, 3), q<Rational>(2, 3)});
  CHECK(r.w.col(0) == Vector<Rational>{q<Rational>(1, 3), q<Rational>(1, 3), q<Rational>(1, 3)});
  CHECK(r.w.col(1) == Vector<Rational>{q<Rational>(-2, 3), q<Rational>(1, 3), q<Rational>(1, 3)});
  CHECK(r.w.col(2) == Vector<Rational>{q<Rational>(1, 2), Rational(-1), q<Rational>(1, 2)});
}

TEST_CASE("exact structural identities of the recovered pair") {
  const auto sys = fx::s3<Rational>();
  const mop::SolveResult<Rational> r = mop::iep_kryl(sys);
  const mop::Matrix<Rational> z = fx::node_diag(sys);
  const mop::Matrix<Rational> hd = r.h.to_dense();

  CHECK(fx::mat_diff_identity(mop::matmul(mop::transpose(r.w), r.v)) == 0.0);
  CHECK(fx::mat_diff(mop::matmul(z, r.v), mop::matmul(r.v, hd)) == 0.0);
  CHECK(fx::mat_diff(mop::matmul(z, r.w), mop::matmul(r.w, mop::transpose(hd))) == 0.0);
}

TEST_CASE("dependent measure pair stops with a typed breakdown") {
  const mop::solver_error e =
      fx::capture_error([] { mop::iep_kryl(fx::s3_dependent<Rational>()); });
  CHECK(e.kind() == errc::breakdown);
  CHECK(e.index() == 2);  // first superdiagonal coupling vanishes
}

TEST_CASE("double-precision recurrence matches the exact band") {
  const mop::SolveResult<double> r = mop::iep_kryl(fx::s3<double>());
  CHECK(fx::band_diff(r.h, fx::h3<Rational>()) < 1e-14);
}

TEST_CASE("normalized variant reproduces the band in both window modes") {
  const auto sys = fx::s3<double>();
  for (const auto window : {mop::ReorthWindow::partial, mop::ReorthWindow::full}) {
    const mop::SolveResult<double> r = mop::iep_krylreorth(sys, window);
    CHECK(fx::band_diff(r.h, fx::h3<Rational>()) < 1e-13);

    // Stored columns: unit w-columns, v-columns carrying 1/sigma, pair
    // biorthonormal, and both stored-basis recurrences hold.
    CHECK(fx::mat_diff_identity(mop::matmul(mop::transpose(r.w), r.v)) < 1e-13);
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::fabs(mop::norm_euclid(r.w.col(j)) - 1.0) < 1e-14);

    const mop::Matrix<double> z = fx::node_diag(sys);
    const mop::Matrix<double> hb = r.h_basis.to_dense();
    CHECK(fx::mat_diff(mop::matmul(z, r.v), mop::matmul(r.v, hb)) < 1e-13);
    CHECK(fx::mat_diff(mop::matmul(z, r.w), mop::matmul(r.w, mop::transpose(hb))) < 1e-13);
  }
}

TEST_CASE("normalized variant tracks the exact reference on a bigger ladder") {
  const auto sysd = mop::make_kravchuk_system<double>(12, 0.4, 0.5);
  const mop::BandedHessenberg<double> href = mop::reference_solve(sysd);
  for (const auto window : {mop::ReorthWindow::partial, mop::ReorthWindow::full}) {
    const mop::SolveResult<double> r = mop::iep_krylreorth(sysd, window);
    CHECK(mop::forward_error(r.h, href) < 2e-9);
  }
  // The unnormalized route loses digits much faster; this only pins the
  // order of magnitude at a short ladder.
  const mop::SolveResult<double> plain = mop::iep_kryl(sysd);
  CHECK(mop::forward_error(plain.h, href) < 5e-2);
}

TEST_CASE("extended-precision normalized solve tightens the error") {
  const auto sysd = mop::make_kravchuk_system<double>(12, 0.4, 0.5);
  const mop::BandedHessenberg<double> href = mop::reference_solve(sysd);
  const auto sys = mop::lift_system<mop::DoubleDouble>(sysd);
  const mop::SolveResult<mop::DoubleDouble> r = mop::iep_krylreorth(sys, mop::ReorthWindow::full);
  CHECK(mop::forward_error(r.h, href) < 1e-15);
}
