#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nehari {

/// Base class of every error raised by the library. `kind()` is the stable,
/// machine-readable class name written into manifests and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define NEHARI_DECLARE_ERROR(Name)                                     \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

// expressions
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("ParseError", what + " at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
 public:
  UnknownIdentifier(const std::string& name, std::size_t offset)
      : Error("UnknownIdentifier",
              "unknown identifier '" + name + "' at byte " + std::to_string(offset)),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

NEHARI_DECLARE_ERROR(DomainError);
NEHARI_DECLARE_ERROR(DivisionByZero);

// discretization
NEHARI_DECLARE_ERROR(DegenerateDomain);
NEHARI_DECLARE_ERROR(GridMismatch);
NEHARI_DECLARE_ERROR(SamplingError);
NEHARI_DECLARE_ERROR(NonConforming);

// solvers
NEHARI_DECLARE_ERROR(NotPositiveDefinite);
NEHARI_DECLARE_ERROR(NonConvergence);
NEHARI_DECLARE_ERROR(ZeroField);
NEHARI_DECLARE_ERROR(PartVanished);
NEHARI_DECLARE_ERROR(ClusterMissing);
NEHARI_DECLARE_ERROR(Unsupported);

// front end
NEHARI_DECLARE_ERROR(ConfigError);
NEHARI_DECLARE_ERROR(IoError);

#undef NEHARI_DECLARE_ERROR

}  // namespace nehari
