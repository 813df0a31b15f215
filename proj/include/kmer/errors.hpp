#pragma once

#include <stdexcept>
#include <string>

namespace kmer {

// Bad user input or violated precondition detected before any compute.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A mutation that would break a RodConfig invariant; the target is untouched.
class RejectedMutation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal consistency check failed (hard-core, occupancy, tile exclusivity).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Exact enumeration refused because the candidate space is too large.
class StateSpaceTooLarge : public std::runtime_error {
 public:
  StateSpaceTooLarge(const std::string& what, std::size_t candidates)
      : std::runtime_error(what), candidates_(candidates) {}
  std::size_t candidates() const noexcept { return candidates_; }

 private:
  std::size_t candidates_;
};

// File system or I/O failure.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kmer
