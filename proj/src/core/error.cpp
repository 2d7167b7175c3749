//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/core/error.h"

#include <string>

namespace cardiogen {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kUnknownCharacter:
    return "UnknownCharacter";
  case ErrorCode::kUnclosedRing:
    return "UnclosedRing";
  case ErrorCode::kUnclosedBranch:
    return "UnclosedBranch";
  case ErrorCode::kValenceViolation:
    return "ValenceViolation";
  case ErrorCode::kMultiComponentInput:
    return "MultiComponentInput";
  case ErrorCode::kInvalidSyntax:
    return "InvalidSyntax";
  case ErrorCode::kUnsupportedElement:
    return "UnsupportedElement";
  case ErrorCode::kUnsupportedFeature:
    return "UnsupportedFeature";
  case ErrorCode::kInvalidAromaticity:
    return "InvalidAromaticity";
  case ErrorCode::kEmptyCorpus:
    return "EmptyCorpus";
  case ErrorCode::kTokenNotInVocabulary:
    return "TokenNotInVocabulary";
  case ErrorCode::kSequenceTooLong:
    return "SequenceTooLong";
  case ErrorCode::kLengthMismatch:
    return "LengthMismatch";
  case ErrorCode::kShapeMismatch:
    return "ShapeMismatch";
  case ErrorCode::kNonFiniteInput:
    return "NonFiniteInput";
  case ErrorCode::kNegativeHessianEstimate:
    return "NegativeHessianEstimate";
  case ErrorCode::kEmptyDataset:
    return "EmptyDataset";
  case ErrorCode::kNonFiniteLoss:
    return "NonFiniteLoss";
  case ErrorCode::kSingleClassInput:
    return "SingleClassInput";
  case ErrorCode::kInvalidArgument:
    return "InvalidArgument";
  case ErrorCode::kVocabMismatch:
    return "VocabMismatch";
  case ErrorCode::kInvalidInputSmiles:
    return "InvalidInputSmiles";
  case ErrorCode::kTooFewRows:
    return "TooFewRows";
  case ErrorCode::kLayoutMismatch:
    return "LayoutMismatch";
  case ErrorCode::kDegenerateData:
    return "DegenerateData";
  case ErrorCode::kFileNotFound:
    return "FileNotFound";
  case ErrorCode::kEmptyAfterFiltering:
    return "EmptyAfterFiltering";
  case ErrorCode::kCorruptCheckpoint:
    return "CorruptCheckpoint";
  case ErrorCode::kVersionMismatch:
    return "VersionMismatch";
  case ErrorCode::kParseError:
    return "ParseError";
  }
  return "Unknown";
}

namespace {
std::string format_message(ErrorCode code, const std::string &message,
                           std::size_t position) {
  std::string out(error_code_name(code));
  if (position != Error::kNoPosition)
    out += " at " + std::to_string(position);
  if (!message.empty())
    out += ": " + message;
  return out;
}
}  // namespace

Error::Error(ErrorCode code, const std::string &message, std::size_t position)
    : std::runtime_error(format_message(code, message, position)), code_(code),
      position_(position) { }

}  // namespace cardiogen
