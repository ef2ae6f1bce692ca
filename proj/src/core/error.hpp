#pragma once

#include <stdexcept>
#include <string>

namespace tlasso {

enum class ErrorCode {
  InvalidArgument,
  EmptyMatrix,
  DimensionMismatch,
  InsufficientTimepoints,
  InsufficientRows,
  InvalidQuantile,
  TooManyEdges,
  LevelMismatch,
  EmptyTruth,
  NoTruePositives,
  MissingCell,
  NonRectangular,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace tlasso
