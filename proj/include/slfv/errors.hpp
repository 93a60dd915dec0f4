#pragma once

#include <stdexcept>
#include <string>

namespace slfv {

// A lineage or an accepted ball left the simulated window. Results computed
// past this point would silently miss events, so the run is aborted.
class BoundaryViolation : public std::runtime_error {
 public:
  explicit BoundaryViolation(const std::string& what)
      : std::runtime_error(what + " (enlarge the box: box.L)") {}
};

// Rejected configuration or precondition (condition verdict, shape kinds).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace slfv
