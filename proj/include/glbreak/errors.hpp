#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glbreak {

enum class ErrorCode {
  InvalidArgument,
  InvalidData,
  InadmissibleDates,
  RankDeficient,
  EmptyProfile,
  InfeasibleSegmentation,
  DegenerateRegime,
  GridTooSmall,
  SupportMismatch,
  EmptySample,
  DegenerateScale,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidData: return "InvalidData";
    case ErrorCode::InadmissibleDates: return "InadmissibleDates";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptyProfile: return "EmptyProfile";
    case ErrorCode::InfeasibleSegmentation: return "InfeasibleSegmentation";
    case ErrorCode::DegenerateRegime: return "DegenerateRegime";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegenerateScale: return "DegenerateScale";
  }
  return "Unknown";
}

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

/// Runs f, prefixing any library error with `stage`.
template <class F>
decltype(auto) with_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.message());
  }
}

}  // namespace glbreak
