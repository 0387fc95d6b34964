#pragma once

#include <stdexcept>
#include <string>

namespace mgg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands live over different universes; complete them first.
class AlignmentError : public Error {
public:
  using Error::Error;
};

/// Two node type sets have an empty intersection.
class TypeClashError : public Error {
public:
  using Error::Error;
};

/// A derivation would leave edges whose endpoints no longer exist.
class DanglingEdgeError : public Error {
public:
  using Error::Error;
};

class InvalidMatchError : public Error {
public:
  using Error::Error;
};

/// Malformed formula, diagram or condition.
class ConditionError : public Error {
public:
  using Error::Error;
};

/// Input document or CLI argument problems.
class InputError : public Error {
public:
  using Error::Error;
};

/// A simple digraph that does not encode a multidigraph, or a rule that
/// would break one.
class MultigraphError : public Error {
public:
  using Error::Error;
};

}  // namespace mgg
