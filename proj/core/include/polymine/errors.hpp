#pragma once

#include <stdexcept>
#include <string>

namespace polymine {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A symbol, sort or element name is unknown or ill-typed.
struct SignatureError : Error {
  using Error::Error;
};

// A free variable is not covered by the binding.
struct BindingError : Error {
  using Error::Error;
};

// An interpretation is missing a random fact it must assign.
struct IncompleteInterpretationError : Error {
  using Error::Error;
};

// A formula does not decompose under the expectation rule system.
struct DecompositionError : Error {
  using Error::Error;
};

// Input data violates a dataset invariant.
struct DataError : Error {
  using Error::Error;
};

// Malformed input file; carries a line number in the message.
struct ParseError : Error {
  using Error::Error;
};

// A run configuration is inconsistent or incomplete.
struct ConfigError : Error {
  using Error::Error;
};

// An exhaustive computation would exceed the supported state space.
struct CapacityError : Error {
  using Error::Error;
};

// A numeric quantity became non-finite during mining.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace polymine
