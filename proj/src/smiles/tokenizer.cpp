//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/smiles/tokenizer.h"

#include <cctype>
#include <string>

#include "cardiogen/core/error.h"

namespace cardiogen::smiles {

namespace {

bool is_bracket_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '@'
         || c == '+' || c == '-' || c == ':';
}

[[noreturn]] void unknown(std::string_view smiles, std::size_t pos) {
  std::string msg = "unexpected character";
  if (pos < smiles.size())
    msg += " '" + std::string(1, smiles[pos]) + "'";
  else
    msg += " (end of input)";
  throw Error(ErrorCode::kUnknownCharacter, msg, pos);
}

}  // namespace

std::vector<Token> tokenize_detailed(std::string_view smiles) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = smiles.size();
  auto emit = [&](TokenKind kind, std::size_t len) {
    out.push_back({ kind, std::string(smiles.substr(i, len)), i });
    i += len;
  };

  while (i < n) {
    const char c = smiles[i];
    switch (c) {
    case '[': {
      std::size_t j = i + 1;
      while (j < n && smiles[j] != ']') {
        if (!is_bracket_char(smiles[j]) && smiles[j] != '*')
          unknown(smiles, j);
        ++j;
      }
      if (j >= n || j == i + 1)
        unknown(smiles, j);
      emit(TokenKind::kBracketAtom, j - i + 1);
      break;
    }
    case 'C':
      emit(TokenKind::kAtom, i + 1 < n && smiles[i + 1] == 'l' ? 2 : 1);
      break;
    case 'B':
      emit(TokenKind::kAtom, i + 1 < n && smiles[i + 1] == 'r' ? 2 : 1);
      break;
    case 'N':
    case 'O':
    case 'P':
    case 'S':
    case 'F':
    case 'I':
    case 'b':
    case 'c':
    case 'n':
    case 'o':
    case 'p':
    case 's':
    case '*':
      emit(TokenKind::kAtom, 1);
      break;
    case '-':
    case '=':
    case '#':
    case ':':
    case '/':
    case '\\':
      emit(TokenKind::kBond, 1);
      break;
    case '(':
      emit(TokenKind::kBranchOpen, 1);
      break;
    case ')':
      emit(TokenKind::kBranchClose, 1);
      break;
    case '.':
      emit(TokenKind::kDot, 1);
      break;
    case '%':
      if (i + 2 < n && std::isdigit(static_cast<unsigned char>(smiles[i + 1]))
          && std::isdigit(static_cast<unsigned char>(smiles[i + 2]))) {
        emit(TokenKind::kRingClosure, 3);
        break;
      }
      unknown(smiles, i + 1 < n ? i + 1 : n);
    default:
      if (std::isdigit(static_cast<unsigned char>(c))) {
        emit(TokenKind::kRingClosure, 1);
        break;
      }
      unknown(smiles, i);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view smiles) {
  std::vector<std::string> out;
  for (Token &t: tokenize_detailed(smiles))
    out.push_back(std::move(t.text));
  return out;
}

}  // namespace cardiogen::smiles
