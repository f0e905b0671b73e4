#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isingtrack {

enum class ErrorCode {
  Parse,
  Schema,
  Coverage,
  InsufficientData,
  DegenerateData,
  Domain,
  Dimension,
  Config,
  Infeasible,
  Size,
  NoSamples,
  LookAhead,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Process exit code for an error category: 2 for configuration and
/// infeasibility problems, 3 for bad input data, 1 otherwise.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace isingtrack
