#pragma once

#include <stdexcept>
#include <string>

namespace geolab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace geolab
