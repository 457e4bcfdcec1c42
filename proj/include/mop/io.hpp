#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <string>
#include <system_error>
#include <type_traits>

#include <json.hpp>

#include "mop/errors.hpp"
#include "mop/linalg.hpp"
#include "mop/model.hpp"
#include "mop/scalar.hpp"

namespace mop {

using nlohmann::json;

// Shortest round-trip decimal form of a double, for CSV cells.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// JSON encodings per kind: doubles as numbers, extended values as [hi, lo]
// pairs, rationals as "p/q" strings.  All three parse back exactly.
template <class S>
json value_to_json(const S& x) {
  if constexpr (std::is_same_v<S, double>) {
    return json(x);
  } else if constexpr (std::is_same_v<S, DoubleDouble>) {
    return json::array({x.hi(), x.lo()});
  } else {
    return json(x.str());
  }
}

template <class S>
S value_from_json(const json& j) {
  if constexpr (std::is_same_v<S, double>) {
    if (!j.is_number()) throw solver_error(errc::validation, "expected a number");
    return j.get<double>();
  } else if constexpr (std::is_same_v<S, DoubleDouble>) {
    if (j.is_number()) return DoubleDouble(j.get<double>());
    if (j.is_array() && j.size() == 2)
      return DoubleDouble(j[0].get<double>()) + DoubleDouble(j[1].get<double>());
    throw solver_error(errc::validation, "expected a number or a [hi, lo] pair");
  } else {
    if (j.is_string()) return Rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number()) return Rational(j.get<double>());
    throw solver_error(errc::validation, "expected a \"p/q\" string or a number");
  }
}

template <class S>
json vector_to_json(const Vector<S>& v) {
  json arr = json::array();
  for (const auto& x : v) arr.push_back(value_to_json(x));
  return arr;
}

template <class S>
Vector<S> vector_from_json(const json& j) {
  if (!j.is_array()) throw solver_error(errc::validation, "expected an array");
  Vector<S> v;
  v.reserve(j.size());
  for (const auto& e : j) v.push_back(value_from_json<S>(e));
  return v;
}

template <class S>
json band_to_json(const BandedHessenberg<S>& h) {
  bool monic = true;
  for (const auto& x : h.sub)
    if (!(x == S(1))) { monic = false; break; }
  return json{{"sub", vector_to_json(h.sub)},
              {"diag", vector_to_json(h.diag)},
              {"super1", vector_to_json(h.super1)},
              {"super2", vector_to_json(h.super2)},
              {"monic", monic}};
}

template <class S>
BandedHessenberg<S> band_from_json(const json& j) {
  BandedHessenberg<S> h;
  h.sub = vector_from_json<S>(j.at("sub"));
  h.diag = vector_from_json<S>(j.at("diag"));
  h.super1 = vector_from_json<S>(j.at("super1"));
  h.super2 = vector_from_json<S>(j.at("super2"));
  const std::size_t n = h.diag.size();
  if (n < 3 || h.sub.size() + 1 != n || h.super1.size() + 1 != n || h.super2.size() + 2 != n)
    throw solver_error(errc::validation, "inconsistent band lengths");
  return h;
}

template <class S>
json system_to_json(const DiscreteSystem<S>& sys) {
  return json{{"nodes", vector_to_json(sys.nodes)},
              {"weights1", vector_to_json(sys.weights1)},
              {"weights2", vector_to_json(sys.weights2)}};
}

template <class S>
DiscreteSystem<S> system_from_json(const json& j) {
  DiscreteSystem<S> sys;
  sys.nodes = vector_from_json<S>(j.at("nodes"));
  sys.weights1 = vector_from_json<S>(j.at("weights1"));
  sys.weights2 = vector_from_json<S>(j.at("weights2"));
  validate_system(sys);
  return sys;
}

template <class S>
json matrix_to_json(const Matrix<S>& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(value_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw solver_error(errc::validation, "cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw solver_error(errc::validation, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace mop
