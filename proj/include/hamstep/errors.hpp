#pragma once

#include <stdexcept>
#include <string>

namespace hamstep {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  Unsupported,
  FixedPointDivergence,
  DegenerateGradient,
  Io,
};

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(ErrorCode::DimensionMismatch, what) {}
};

class Unsupported : public Error {
 public:
  explicit Unsupported(const std::string& what) : Error(ErrorCode::Unsupported, what) {}
};

/// The fixed-point sweep hit its iteration cap or blew up; usually the stepsize is too large.
class FixedPointDivergence : public Error {
 public:
  explicit FixedPointDivergence(const std::string& what)
      : Error(ErrorCode::FixedPointDivergence, what) {}
};

/// ||grad H|| (or its quadrature average) fell below the configured floor.
class DegenerateGradient : public Error {
 public:
  explicit DegenerateGradient(const std::string& what) : Error(ErrorCode::DegenerateGradient, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

/// Rethrows `e` as the same error type with `context` prepended to its message.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
  const std::string msg = context + ": " + e.what();
  switch (e.code()) {
    case ErrorCode::InvalidArgument: throw InvalidArgument(msg);
    case ErrorCode::DimensionMismatch: throw DimensionMismatch(msg);
    case ErrorCode::Unsupported: throw Unsupported(msg);
    case ErrorCode::FixedPointDivergence: throw FixedPointDivergence(msg);
    case ErrorCode::DegenerateGradient: throw DegenerateGradient(msg);
    case ErrorCode::Io: throw IoError(msg);
  }
  throw Error(e.code(), msg);
}

}  // namespace hamstep
