#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace phasent {

/// Argument outside the mathematical domain of an operation (non-positive
/// width, out-of-range folded distance, under-resolved grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed binary input. Carries the byte offset at which decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver gave up. The partial result is usually still reported by
/// the caller; this is thrown only when no usable estimate exists.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phasent
