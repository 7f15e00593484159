#pragma once

#include <stdexcept>
#include <string>

namespace mfgdc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed binary field or trajectory file.
class FormatError : public Error {
 public:
  enum class Kind { bad_magic, version_mismatch, truncated, shape_overflow, invalid_shape, io };

  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace mfgdc
