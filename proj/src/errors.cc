#include "uaeval/errors.h"

namespace uaeval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kEmptyBlock:
      return "EmptyBlock";
    case ErrorCode::kDuplicateClassAcrossBlocks:
      return "DuplicateClassAcrossBlocks";
    case ErrorCode::kClassIdOutOfRange:
      return "ClassIdOutOfRange";
    case ErrorCode::kCombinatorialCap:
      return "CombinatorialCap";
    case ErrorCode::kAllZeroMass:
      return "AllZeroMass";
    case ErrorCode::kNonPositiveWeight:
      return "NonPositiveWeight";
    case ErrorCode::kBlockTooLarge:
      return "BlockTooLarge";
    case ErrorCode::kMissingRiskMapping:
      return "MissingRiskMapping";
    case ErrorCode::kTooManyClasses:
      return "TooManyClasses";
    case ErrorCode::kParseError:
      return "ParseError";
    case ErrorCode::kUnknownClassName:
      return "UnknownClassName";
    case ErrorCode::kDanglingCaseId:
      return "DanglingCaseId";
    case ErrorCode::kConfigError:
      return "ConfigError";
  }
  return "Unknown";
}

}  // namespace uaeval
