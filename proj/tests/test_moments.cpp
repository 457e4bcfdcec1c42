#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"

using mop::errc;
using mop::Rational;
using fx::q;

TEST_CASE("mixed moment matrix of the three-point system") {
  const mop::Matrix<Rational> m = mop::moment_matrix(fx::s3<Rational>());
  const Rational e[3][3] = {{Rational(1), Rational(1), q<Rational>(5, 3)},
                            {Rational(0), Rational(1), q<Rational>(5, 3)},
                            {Rational(1), q<Rational>(5, 3), Rational(3)}};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(m(i, j) == e[i][j]);
}

TEST_CASE("LDU of the mixed moment matrix, exactly") {
  const mop::LDUFactors<Rational> f = mop::ldu_unpivoted(mop::moment_matrix(fx::s3<Rational>()));

  CHECK(f.diag == mop::Vector<Rational>{Rational(1), Rational(1), q<Rational>(2, 9)});
  CHECK(f.lower(2, 0) == Rational(1));
  CHECK(f.lower(2, 1) == q<Rational>(2, 3));
  CHECK(f.lower(1, 0) == Rational(0));
  CHECK(f.upper(0, 1) == Rational(1));
  CHECK(f.upper(0, 2) == q<Rational>(5, 3));
  CHECK(f.upper(1, 2) == q<Rational>(5, 3));
}

TEST_CASE("moment-route reference solve is exact and biorthogonal") {
  const auto sys = fx::s3<Rational>();
  const mop::SolveResult<Rational> r = mop::oracle_solve(sys);

  CHECK(fx::band_diff(r.h, fx::h3<Rational>()) == 0.0);
  CHECK(r.h_basis.monic());  // exact arithmetic: the band comes out monic already

  // Same biorthogonal pair as the recurrence route.
  CHECK(r.v.col(1) == mop::Vector<Rational>{Rational(-1), Rational(0), Rational(1)});
  CHECK(r.v.col(2) == mop::Vector<Rational>{Rational(0), q<Rational>(-2, 3), q<Rational>(2, 3)});
  CHECK(r.w.col(2) == mop::Vector<Rational>{q<Rational>(1, 2), Rational(-1), q<Rational>(1, 2)});
  CHECK(fx::mat_diff_identity(mop::matmul(mop::transpose(r.w), r.v)) == 0.0);
}

TEST_CASE("two independent exact routes agree on a real weight ladder") {
  const auto sys = mop::make_kravchuk_system<Rational>(7, q<Rational>(2, 5), q<Rational>(1, 2));
  const mop::SolveResult<Rational> a = mop::iep_kryl(sys);
  const mop::SolveResult<Rational> b = mop::oracle_solve(sys);
  CHECK(fx::band_diff(a.h, b.h) == 0.0);
  CHECK(fx::mat_diff(a.v, b.v) == 0.0);
  CHECK(fx::mat_diff(a.w, b.w) == 0.0);
}

TEST_CASE("dependent measure pair surfaces as a vanishing leading minor") {
  const mop::solver_error e =
      fx::capture_error([] { mop::oracle_solve(fx::s3_dependent<Rational>()); });
  CHECK(e.kind() == errc::lu_breakdown);
  CHECK(e.index() == 2);
}

TEST_CASE("double-precision moment route stays near the exact band") {
  const mop::SolveResult<double> r = mop::oracle_solve(fx::s3<double>());
  CHECK(fx::band_diff(r.h, fx::h3<Rational>()) < 1e-14);
}
