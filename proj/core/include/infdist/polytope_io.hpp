#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "infdist/geometry.hpp"

namespace infdist {

// Line-oriented text format:
//
//   d m r R
//   a_11 ... a_1d b_1        (m constraint lines)
//   ...
//   c_1 ... c_d              (inner-ball center)
//
// Blank lines and lines starting with '#' are skipped. Errors carry the
// source name and line number.
class LineReader {
 public:
  LineReader(std::istream& in, std::string source);

  // Next non-blank, non-comment line split into numbers. Rejects NaN/Inf
  // and anything that does not parse as a decimal float.
  std::vector<double> numbers(const char* what);

  // Same, but requires exactly `count` values.
  std::vector<double> numbers(const char* what, std::size_t count);

  int line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  int line_ = 0;
};

Polytope read_polytope(LineReader& reader);
Polytope read_polytope(std::istream& in, const std::string& source = "<polytope>");
Polytope load_polytope(const std::string& path);

void write_polytope(std::ostream& out, const Polytope& polytope);

}  // namespace infdist
