#pragma once

#include <stdexcept>
#include <string>

namespace ideanet {

// Malformed input files. CLI exit code 2.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid values, configs or lookups. CLI exit code 3.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LookupError : DomainError {
  using DomainError::DomainError;
};

}  // namespace ideanet
