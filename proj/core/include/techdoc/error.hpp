#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace techdoc {

enum class ErrorCode {
  kDuplicateId,
  kUnknownId,
  kUnknownParent,
  kUnknownRole,
  kUnknownConcept,
  kCycle,
  kRangeViolation,
  kRuleLoop,
  kMalformedQuery,
  kParseError,
  kRefinementCycle,
  kUnresolvedPlaceholder,
  kUnresolvedParticipant,
  kEmptyPlan,
  kMissingLexiconEntry,
  kMorphologyGap,
  kUnknownFormat,
  kDigestMismatch,
  kInvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

// All pipeline failures are reported with this exception. `subject` names the
// offending id (concept, instance, plan, lexicon key) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        subject_(std::move(subject)) {}

  ErrorCode code() const { return code_; }
  const std::string& subject() const { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace techdoc
