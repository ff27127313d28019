#pragma once

#include <stdexcept>
#include <string>

namespace biofilm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecompositionError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's preconditions (ghost widths, policies, sizes).
class ContractError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class PreconditionerError : public Error {
 public:
  using Error::Error;
};

class CoefficientError : public Error {
 public:
  using Error::Error;
};

// A physical field left its admissible range (negative Monod denominator,
// non-positive solvent fraction, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised on every rank when a peer rank failed and collectives can no longer
// complete.
class CommAborted : public Error {
 public:
  using Error::Error;
};

}  // namespace biofilm
