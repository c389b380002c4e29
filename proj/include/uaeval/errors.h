#ifndef UAEVAL_ERRORS_H_
#define UAEVAL_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace uaeval {

enum class ErrorCode {
  kInvalidArgument,
  kEmptyBlock,
  kDuplicateClassAcrossBlocks,
  kClassIdOutOfRange,
  kCombinatorialCap,
  kAllZeroMass,
  kNonPositiveWeight,
  kBlockTooLarge,
  kMissingRiskMapping,
  kTooManyClasses,
  kParseError,
  kUnknownClassName,
  kDanglingCaseId,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so the
// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace uaeval

#endif  // UAEVAL_ERRORS_H_
