#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fmridesign {

// Base for every error the library raises on a violated precondition.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A construction whose existence conditions are not met (e.g. Paley with N not prime).
class ConstructionUnavailable : public DesignError {
 public:
  using DesignError::DesignError;
};

class InvalidArgument : public DesignError {
 public:
  using DesignError::DesignError;
};

// Least squares or criterion evaluation hit a rank-deficient system.
class SingularSystem : public DesignError {
 public:
  SingularSystem(const std::string& what, int rank_found)
      : DesignError(what), rank_(rank_found) {}
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

// An exhaustive enumeration would exceed the configured evaluation budget.
class ResourceCapExceeded : public std::runtime_error {
 public:
  ResourceCapExceeded(const std::string& what, std::uint64_t required, std::uint64_t cap)
      : std::runtime_error(what), required_(required), cap_(cap) {}
  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t required_;
  std::uint64_t cap_;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace fmridesign
