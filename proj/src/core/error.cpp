#include "error.hpp"

namespace tlasso {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientTimepoints: return "InsufficientTimepoints";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::InvalidQuantile: return "InvalidQuantile";
    case ErrorCode::TooManyEdges: return "TooManyEdges";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::EmptyTruth: return "EmptyTruth";
    case ErrorCode::NoTruePositives: return "NoTruePositives";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::NonRectangular: return "NonRectangular";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tlasso
