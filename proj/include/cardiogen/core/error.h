//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CORE_ERROR_H_
#define CARDIOGEN_CORE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cardiogen {

enum class ErrorCode {
  // smiles
  kUnknownCharacter,
  kUnclosedRing,
  kUnclosedBranch,
  kValenceViolation,
  kMultiComponentInput,
  kInvalidSyntax,
  kUnsupportedElement,
  kUnsupportedFeature,
  kInvalidAromaticity,
  kEmptyCorpus,
  kTokenNotInVocabulary,
  kSequenceTooLong,
  // chem / numerics
  kLengthMismatch,
  kShapeMismatch,
  kNonFiniteInput,
  kNegativeHessianEstimate,
  // models
  kEmptyDataset,
  kNonFiniteLoss,
  kSingleClassInput,
  kInvalidArgument,
  kVocabMismatch,
  // pipeline
  kInvalidInputSmiles,
  kTooFewRows,
  kLayoutMismatch,
  kDegenerateData,
  // io
  kFileNotFound,
  kEmptyAfterFiltering,
  kCorruptCheckpoint,
  kVersionMismatch,
  kParseError,
};

std::string_view error_code_name(ErrorCode code);

/// Base exception for every recoverable failure in the library. `position`
/// carries a character or token index when the failure has a location.
class Error: public std::runtime_error {
public:
  static constexpr std::size_t kNoPosition = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string &message,
        std::size_t position = kNoPosition);

  ErrorCode code() const noexcept { return code_; }
  std::size_t position() const noexcept { return position_; }
  bool has_position() const noexcept { return position_ != kNoPosition; }

private:
  ErrorCode code_;
  std::size_t position_;
};

}  // namespace cardiogen

#endif  // CARDIOGEN_CORE_ERROR_H_
