#pragma once

#include <stdexcept>
#include <string>

namespace graphsvx {

// Base class for every error raised by the library. The CLI maps
// InputError subclasses to exit code 2 and DomainError subclasses to 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class MissingLabels : public InputError {
 public:
  using InputError::InputError;
};

class InconsistentDimensions : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class EmptyPlayerSet : public DomainError {
 public:
  using DomainError::DomainError;
};

class BudgetTooSmall : public DomainError {
 public:
  using DomainError::DomainError;
};

class TooManyPlayers : public DomainError {
 public:
  using DomainError::DomainError;
};

class InsufficientSamples : public DomainError {
 public:
  using DomainError::DomainError;
};

class TargetNotInMotif : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace graphsvx
