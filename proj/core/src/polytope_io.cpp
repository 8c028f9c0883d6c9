#include "infdist/polytope_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "infdist/errors.hpp"

namespace infdist {

LineReader::LineReader(std::istream& in, std::string source)
    : in_(in), source_(std::move(source)) {}

std::vector<double> LineReader::numbers(const char* what) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;

    std::vector<double> values;
    std::istringstream tokens(text);
    std::string token;
    while (tokens >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size()) {
        throw ConfigError(source_, line_, std::string("bad number '") + token + "' in " + what);
      }
      if (!std::isfinite(v)) {
        throw ConfigError(source_, line_, std::string("non-finite value in ") + what);
      }
      values.push_back(v);
    }
    return values;
  }
  throw ConfigError(source_, line_ + 1, std::string("unexpected end of input, expected ") + what);
}

std::vector<double> LineReader::numbers(const char* what, std::size_t count) {
  auto values = numbers(what);
  if (values.size() != count) {
    throw ConfigError(source_, line_,
                      std::string("expected ") + std::to_string(count) + " values in " + what +
                          ", got " + std::to_string(values.size()));
  }
  return values;
}

namespace {

int as_count(double v, const LineReader& reader, const char* what) {
  if (v < 1 || v != std::floor(v) || v > 1e7) {
    throw ConfigError(reader.source(), reader.line(),
                      std::string(what) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace

Polytope read_polytope(LineReader& reader) {
  const auto header = reader.numbers("polytope header 'd m r R'", 4);
  const int d = as_count(header[0], reader, "d");
  const int m = as_count(header[1], reader, "m");
  const int header_line = reader.line();

  Matrix A(m, d);
  Vector b(m);
  for (int i = 0; i < m; ++i) {
    const auto row = reader.numbers("constraint row", static_cast<std::size_t>(d) + 1);
    for (int j = 0; j < d; ++j) A(i, j) = row[j];
    b[i] = row[d];
  }
  const auto c = reader.numbers("inner-ball center", static_cast<std::size_t>(d));
  Vector center = Eigen::Map<const Vector>(c.data(), d);

  try {
    return Polytope(std::move(A), std::move(b), std::move(center), header[2], header[3]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.source(), header_line, e.what());
  }
}

Polytope read_polytope(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  return read_polytope(reader);
}

Polytope load_polytope(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open polytope file '" + path + "'");
  return read_polytope(in, path);
}

void write_polytope(std::ostream& out, const Polytope& polytope) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << polytope.dim() << ' ' << polytope.num_constraints() << ' ' << polytope.inner_radius()
      << ' ' << polytope.outer_radius() << '\n';
  for (int i = 0; i < polytope.num_constraints(); ++i) {
    for (int j = 0; j < polytope.dim(); ++j) out << polytope.A()(i, j) << ' ';
    out << polytope.b()[i] << '\n';
  }
  for (int j = 0; j < polytope.dim(); ++j) {
    out << polytope.center()[j] << (j + 1 < polytope.dim() ? ' ' : '\n');
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace infdist
