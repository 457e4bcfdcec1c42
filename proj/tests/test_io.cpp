#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "fixtures.hpp"

using mop::DoubleDouble;
using mop::errc;
using mop::json;
using mop::Rational;
using fx::q;

TEST_CASE("shortest decimal form round-trips every double") {
  for (double x : {0.1, 1.0 / 3.0, -2.5, 1e300, 5e-324, 0.0, -0.0, 123456789.123456789}) {
    const std::string s = mop::format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(mop::format_double(0.5) == "0.5");
}

TEST_CASE("scalar json codecs are exact for all three kinds") {
  CHECK(mop::value_from_json<double>(mop::value_to_json(0.1)) == 0.1);

  const DoubleDouble d = DoubleDouble(1) / DoubleDouble(3);
  const json jd = mop::value_to_json(d);
  REQUIRE(jd.is_array());
  REQUIRE(jd.size() == 2);
  const DoubleDouble dback = mop::value_from_json<DoubleDouble>(jd);
  CHECK(dback.hi() == d.hi());
  CHECK(dback.lo() == d.lo());
  // A plain number is accepted too.
  CHECK(mop::value_from_json<DoubleDouble>(json(0.25)).hi() == 0.25);

  const Rational r = q<Rational>(-22, 7);
  CHECK(mop::value_to_json(r).get<std::string>() == "-22/7");
  CHECK(mop::value_from_json<Rational>(mop::value_to_json(r)) == r);
  CHECK(mop::value_from_json<Rational>(json(5)) == Rational(5));
  CHECK(mop::value_from_json<Rational>(json(0.375)) == q<Rational>(3, 8));

  const auto err = fx::capture_error([] { mop::value_from_json<double>(json("nope")); });
  CHECK(err.kind() == errc::validation);
}

TEST_CASE("band codec round-trips and flags the normalized form") {
  const auto h = fx::h3<Rational>();
  const json j = mop::band_to_json(h);
  CHECK(j.at("monic").get<bool>());
  const auto back = mop::band_from_json<Rational>(j);
  CHECK(back.sub == h.sub);
  CHECK(back.diag == h.diag);
  CHECK(back.super1 == h.super1);
  CHECK(back.super2 == h.super2);

  auto pre = h;
  pre.sub[0] = q<Rational>(1, 2);
  CHECK_FALSE(mop::band_to_json(pre).at("monic").get<bool>());

  json bad = j;
  bad["super2"] = json::array();  // wrong length for size 3
  const auto err = fx::capture_error([&] { mop::band_from_json<Rational>(bad); });
  CHECK(err.kind() == errc::validation);
}

TEST_CASE("system codec validates what it parses") {
  const auto sys = fx::s3<Rational>();
  const auto back = mop::system_from_json<Rational>(mop::system_to_json(sys));
  CHECK(back.nodes == sys.nodes);
  CHECK(back.weights1 == sys.weights1);
  CHECK(back.weights2 == sys.weights2);

  json dup = mop::system_to_json(sys);
  dup["nodes"][1] = dup["nodes"][0];  // repeated support point
  const auto err = fx::capture_error([&] { mop::system_from_json<Rational>(dup); });
  CHECK(err.kind() == errc::validation);
}

TEST_CASE("double system survives a file round-trip bit for bit") {
  const auto sys = mop::make_kravchuk_system<double>(7, 0.4, 0.5);
  const std::string path =
      (std::filesystem::temp_directory_path() / "mop_io_roundtrip.json").string();
  mop::write_json_file(path, mop::system_to_json(sys));
  const auto back = mop::system_from_json<double>(mop::read_json_file(path));
  std::remove(path.c_str());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    CHECK(back.nodes[i] == sys.nodes[i]);
    CHECK(back.weights1[i] == sys.weights1[i]);
    CHECK(back.weights2[i] == sys.weights2[i]);
  }
}

TEST_CASE("missing file is a typed validation failure") {
  const auto err =
      fx::capture_error([] { mop::read_json_file("/nonexistent/dir/never.json"); });
  CHECK(err.kind() == errc::validation);
}

TEST_CASE("matrix codec emits row-major nested arrays") {
  mop::Matrix<double> m(2, 3);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = static_cast<double>(10 * i + j);
  const json j = mop::matrix_to_json(m);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[1][2].get<double>() == 12.0);
}
