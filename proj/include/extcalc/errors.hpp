#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace extcalc {

/// Malformed input text. `offset()` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        detail_(what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }
  /// Message without the offset suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t offset_;
};

/// Evaluation outside the domain of a subexpression (division by zero, log of a nonpositive value).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched dimensions or degrees between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A name that does not resolve (form, map, chart, transition).
class ReferenceError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Could not draw enough valid sample points.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace extcalc
