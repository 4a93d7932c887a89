#include "tempheno/error.hpp"

namespace tempheno {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonBinaryValue: return "NonBinaryValue";
    case ErrorCode::EmptyTensor: return "EmptyTensor";
    case ErrorCode::RaggedFeatureDim: return "RaggedFeatureDim";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::UnequalLengths: return "UnequalLengths";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
    case ErrorCode::TooFewIndividuals: return "TooFewIndividuals";
    case ErrorCode::ZeroNormGroundTruth: return "ZeroNormGroundTruth";
    case ErrorCode::RankTooSmall: return "RankTooSmall";
    case ErrorCode::InfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace tempheno
