#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tempheno {

enum class ErrorCode {
  NonBinaryValue,
  EmptyTensor,
  RaggedFeatureDim,
  RankMismatch,
  UnequalLengths,
  ShapeMismatch,
  WindowTooLarge,
  NonFiniteLoss,
  FeatureMismatch,
  TooFewIndividuals,
  ZeroNormGroundTruth,
  RankTooSmall,
  InfeasibleConfig,
  InvalidArgument,
  ParseError,
  UnknownFeature,
  TimeOutOfRange,
  VersionMismatch,
  CorruptFile,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Numerical divergence is reported separately from input validation so that
// callers (the CLI in particular) can map the two to different exit codes.
inline bool is_numerical(ErrorCode code) noexcept { return code == ErrorCode::NonFiniteLoss; }

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tempheno
