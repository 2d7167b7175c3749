//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_SMILES_TOKENIZER_H_
#define CARDIOGEN_SMILES_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cardiogen::smiles {

enum class TokenKind {
  kAtom,         // organic-subset atom, e.g. C, Cl, c
  kBracketAtom,  // full bracket atom, e.g. [NH4+]
  kBond,         // - = # : / \.
  kBranchOpen,
  kBranchClose,
  kRingClosure,  // single digit or %nn
  kDot,
};

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset;  // character offset in the input
};

/// Splits a SMILES string into grammar tokens. Bracket atoms, two-letter
/// organic atoms and %nn ring closures are single tokens, so the tokens
/// always concatenate back to the input.
///
/// Throws Error(kUnknownCharacter) with the character offset on anything
/// outside the grammar, including an unterminated bracket.
std::vector<Token> tokenize_detailed(std::string_view smiles);

std::vector<std::string> tokenize(std::string_view smiles);

}  // namespace cardiogen::smiles

#endif  // CARDIOGEN_SMILES_TOKENIZER_H_
