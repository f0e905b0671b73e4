#include "isingtrack/errors.hpp"

namespace isingtrack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Schema: return "schema error";
    case ErrorCode::Coverage: return "coverage error";
    case ErrorCode::InsufficientData: return "insufficient data";
    case ErrorCode::DegenerateData: return "degenerate data";
    case ErrorCode::Domain: return "domain error";
    case ErrorCode::Dimension: return "dimension error";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::Size: return "size error";
    case ErrorCode::NoSamples: return "no samples";
    case ErrorCode::LookAhead: return "look-ahead violation";
    case ErrorCode::Io: return "i/o error";
  }
  return "error";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Infeasible:
    case ErrorCode::Size:
      return 2;
    case ErrorCode::Parse:
    case ErrorCode::Schema:
    case ErrorCode::Coverage:
    case ErrorCode::InsufficientData:
    case ErrorCode::DegenerateData:
    case ErrorCode::Domain:
    case ErrorCode::Io:
      return 3;
    default:
      return 1;
  }
}

}  // namespace isingtrack
