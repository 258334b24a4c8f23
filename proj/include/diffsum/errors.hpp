#pragma once

#include <stdexcept>
#include <string>

namespace diffsum {

// Base of everything the library throws on a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySetError : public Error {
 public:
  explicit EmptySetError(const std::string& op) : Error(op + ": empty input set") {}
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// A configured limit (materialization, sieve, oracle size, work budget) was hit.
class LimitError : public Error {
 public:
  using Error::Error;
};

class SearchFailure : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffsum
