#pragma once

#include <stdexcept>
#include <string>

namespace infdist {

// Malformed user input: polytope/instance files, density specs, CLI flags.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& source, int line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

// A caller broke a contract the library cannot check up front, e.g. a
// sampling oracle that returned a point outside the body, or a declared
// outer radius that a sampled point exceeds.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace infdist
