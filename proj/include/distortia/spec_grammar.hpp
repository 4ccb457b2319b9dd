#pragma once

#include <cctype>
#include <cstdlib>
#include <string>

#include "distortia/csv.hpp"
#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"
#include "distortia/generator.hpp"

// Generator spec grammar (shared with the CLI):
//   cvar | aimin | aimax | wang | knots:<path>
//   | scale(<float>,<spec>) | dual(<spec>) | mix(<spec>,<spec>)
//   | min(<spec>,<spec>) | max(<spec>,<spec>)
// Parsing is whitespace tolerant; canonical form has no spaces and
// %.15g floats, and parse(canonical) is a fixed point.

namespace distortia {

namespace detail {

struct SpecParser {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool consume(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c))
      throw ValidationError("generator spec: expected '" + std::string(1, c) + "' at position " +
                            std::to_string(pos) + " in '" + s + "'");
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ValidationError("generator spec: expected a number in '" + s + "'");
    pos += static_cast<size_t>(end - begin);
    return v;
  }

  std::string path_until_delim() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != ')') ++pos;
    std::string p = s.substr(start, pos - start);
    while (!p.empty() && std::isspace(static_cast<unsigned char>(p.back()))) p.pop_back();
    if (p.empty()) throw ValidationError("generator spec: empty knots path in '" + s + "'");
    return p;
  }

  Generator parse_spec() {
    std::string name = ident();
    if (name == "cvar" || name == "aimin" || name == "aimax" || name == "wang")
      return make_builtin_generator(name);
    if (name == "knots") {
      expect(':');
      std::string path = path_until_delim();
      return make_knot_generator(read_knots_csv(path), "knots:" + path);
    }
    if (name == "scale") {
      expect('(');
      double lambda = number();
      expect(',');
      Generator g = parse_spec();
      expect(')');
      return scale_generator(lambda, g);
    }
    if (name == "dual") {
      expect('(');
      Generator g = parse_spec();
      expect(')');
      return dual_generator(g);
    }
    if (name == "mix" || name == "min" || name == "max") {
      expect('(');
      Generator a = parse_spec();
      expect(',');
      Generator b = parse_spec();
      expect(')');
      if (name == "mix") return sum_generators(a, b);
      if (name == "min") return min_generators(a, b);
      return concave_majorant_max(a, b);
    }
    throw ValidationError("generator spec: unknown form '" + name + "' in '" + s + "'");
  }
};

}  // namespace detail

inline Generator parse_generator_spec(const std::string& spec) {
  detail::SpecParser p{spec};
  Generator g = p.parse_spec();
  p.skip_ws();
  if (p.pos != spec.size())
    throw ValidationError("generator spec: trailing characters in '" + spec + "'");
  return g;
}

inline std::string canonical_generator_spec(const std::string& spec) {
  return parse_generator_spec(spec).spec();
}

/// Distortion spec: pow(<p>) | clamp(<c>) | wang1 | identity, or a path to
/// a CSV table of (x, psi) rows.
inline Distortion parse_distortion_spec(const std::string& spec) {
  detail::SpecParser p{spec};
  std::string name = p.ident();
  if (name == "pow" || name == "clamp") {
    p.expect('(');
    double v = p.number();
    p.expect(')');
    p.skip_ws();
    if (p.pos != spec.size())
      throw ValidationError("distortion spec: trailing characters in '" + spec + "'");
    return name == "pow" ? power_distortion(v) : clamp_distortion(v);
  }
  if (name == "wang1") {
    p.skip_ws();
    if (p.pos != spec.size())
      throw ValidationError("distortion spec: trailing characters in '" + spec + "'");
    return wang_distortion(1.0);
  }
  if (name == "identity") return identity_distortion();
  // Otherwise treat the whole spec as a CSV path.
  return piecewise_linear_distortion(read_distortion_csv(spec));
}

}  // namespace distortia
