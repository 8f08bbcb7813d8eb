#pragma once

// =============================================================================
// JSON codecs shared by the CLI and the file formats.
//
// Conventions, applied uniformly:
//   * rationals are strings "p" or "p/q" — never floats;
//   * exponent/multi-index keys are comma-joined with an explicit, fixed
//     variable count, e.g. "2,0,1";
//   * fiber basis keys pair a symmetric multi-index with a hom index as
//     "<multi>|<row>,<col>", e.g. "1,1|0,2";
//   * objects use insertion-ordered JSON so identical data serializes to
//     byte-identical text.
// =============================================================================

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "projquant/linalg.hpp"
#include "projquant/polynomial.hpp"
#include "projquant/rational.hpp"

namespace projquant {

using Json = nlohmann::ordered_json;

inline Json rational_to_json(const Rational& r) { return format_rational(r); }

inline Rational json_to_rational(const Json& j) {
  if (j.is_number_integer()) return Rational(static_cast<long long>(j.get<long long>()));
  if (!j.is_string())
    throw std::invalid_argument("expected rational as \"p/q\" string, got: " + j.dump());
  return parse_rational(j.get<std::string>());
}

/// "a,b,c" with exactly `nvars` entries (monomials are stored trimmed).
inline std::string mono_key(const Mono& e, std::size_t nvars) {
  std::string s;
  for (std::size_t i = 0; i < nvars; ++i) {
    if (i) s += ',';
    s += std::to_string(i < e.size() ? e[i] : 0u);
  }
  return s;
}

inline std::vector<std::uint32_t> parse_index_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad index list: \"" + s + "\"");
    out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline Json poly_to_json(const Poly& p, std::size_t nvars) {
  Json j = Json::object();
  for (const auto& [e, c] : p.terms()) j[mono_key(e, nvars)] = format_rational(c);
  return j;
}

inline Poly json_to_poly(const Json& j) {
  Poly p;
  if (!j.is_object()) throw std::invalid_argument("polynomial must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto exps = parse_index_list(it.key());
    Poly term(json_to_rational(it.value()));
    for (std::size_t v = 0; v < exps.size(); ++v)
      if (exps[v]) term *= Poly::monomial(v, exps[v]);
    p += term;
  }
  return p;
}

inline Json vec_to_json(const Vec& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(format_rational(v(i)));
  return j;
}

inline Vec json_to_vec(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected JSON array of rationals");
  Vec v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = json_to_rational(j[i]);
  return v;
}

inline Json mat_to_json(const Mat& m) {
  Json j = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(format_rational(m(i, k)));
    j.push_back(std::move(row));
  }
  return j;
}

inline Mat json_to_mat(const Json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected JSON array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Mat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(j[i].size()) != cols)
      throw std::invalid_argument("ragged matrix rows in JSON");
    for (Index k = 0; k < cols; ++k) m(i, k) = json_to_rational(j[i][k]);
  }
  return m;
}

}  // namespace projquant
