#pragma once

#include <stdexcept>
#include <string>

namespace climd {

/// Process exit codes used by the command-line tool.
enum class ExitCode : int {
  success = 0,
  validation = 1,
  infeasible = 2,
  io = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Malformed input, violated precondition, or an undefined quantity.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ExitCode::validation, what) {}
};

/// Requested subset cannot be drawn from the available samples.
class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ExitCode::infeasible, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

}  // namespace climd
