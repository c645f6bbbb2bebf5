#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l2approx {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands belong to different groups (or a payload does not fit its group).
class FamilyMismatch : public Error {
 public:
  using Error::Error;
};

// Invalid construction input: bad table, bad permutation, bad provider
// parameters, incompatible shapes.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A differential composite is nonzero; `degree` is the lower index j of
// the offending product d_{j+1} * d_j. row() and col() are 0-based, the
// message quotes the entry 1-based.
class NonzeroComposite : public Error {
 public:
  NonzeroComposite(std::size_t degree, std::size_t row, std::size_t col,
                   const std::string& what)
      : Error(what), degree_(degree), row_(row), col_(col) {}
  std::size_t degree() const { return degree_; }
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t degree_, row_, col_;
};

// Text did not conform to the ring-element grammar. `position` is a 0-based
// byte offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(message + " at position " + std::to_string(position)),
        position_(position),
        message_(message) {}
  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t position_;
  std::string message_;
};

// A size cap was exceeded. Signals resource exhaustion, not a math error.
class ResourceExhausted : public Error {
 public:
  using Error::Error;
};

// A homology pipeline was handed a heuristic (non-genuine) quotient.
class NotGenuine : public Error {
 public:
  using Error::Error;
};

// Two routes that must agree did not. Always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace l2approx
