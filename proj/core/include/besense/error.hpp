#pragma once

#include <stdexcept>
#include <string>

namespace besense {

/// Error classes; the CLI maps each to a distinct exit code.
enum class ErrorKind {
  InvalidArgument,  ///< a precondition or parameter invariant was violated
  Parse,            ///< malformed input file or config
  Io,               ///< file could not be read or written
  Stage,            ///< a pipeline stage could not produce a result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace besense
