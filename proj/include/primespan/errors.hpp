#pragma once

#include <stdexcept>
#include <string>

namespace primespan {

// A request that exceeds the configured desk-scale limits; callers can lift
// the limits explicitly where the interface allows it.
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace primespan
