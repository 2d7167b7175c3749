//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/smiles/vocabulary.h"

#include <algorithm>
#include <fstream>
#include <map>

#include "cardiogen/core/error.h"
#include "cardiogen/smiles/tokenizer.h"

namespace cardiogen::smiles {

Vocabulary::Vocabulary() {
  for (std::string_view s: { kPadToken, kClsToken, kEosToken, kMaskToken })
    add(s);
}

int Vocabulary::add(std::string_view token, std::int64_t count) {
  if (auto it = index_.find(std::string(token)); it != index_.end())
    return it->second;
  const int id = size();
  tokens_.emplace_back(token);
  counts_.push_back(count);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

int Vocabulary::id(std::string_view token) const {
  auto found = find(token);
  if (!found)
    throw Error(ErrorCode::kTokenNotInVocabulary,
                "token '" + std::string(token) + "'");
  return *found;
}

VocabularyBuild build_vocabulary(std::span<const std::string> corpus,
                                 std::int64_t min_count) {
  if (corpus.empty())
    throw Error(ErrorCode::kEmptyCorpus, "no molecules in corpus");

  std::map<std::string, std::int64_t> counts;
  std::vector<std::vector<std::string>> tokenized(corpus.size());
  VocabularyBuild out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      tokenized[i] = tokenize(corpus[i]);
    } catch (const Error &) {
      out.untokenizable.push_back(i);
      continue;
    }
    for (const auto &t: tokenized[i])
      ++counts[t];
  }
  if (counts.empty())
    throw Error(ErrorCode::kEmptyCorpus, "no tokenizable molecules in corpus");

  for (const auto &[tok, n]: counts)
    if (n >= min_count)
      out.vocab.add(tok, n);

  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (tokenized[i].empty())
      continue;
    const bool excluded = std::any_of(
        tokenized[i].begin(), tokenized[i].end(),
        [&](const std::string &t) { return !out.vocab.find(t); });
    if (excluded)
      out.flagged.push_back(i);
  }
  return out;
}

TokenSequence encode_sequence(std::span<const std::string> tokens,
                              const Vocabulary &vocab, int block_size) {
  const int limit = block_size - 2;
  if (static_cast<int>(tokens.size()) > limit)
    throw Error(ErrorCode::kSequenceTooLong,
                std::to_string(tokens.size()) + " content tokens, limit "
                    + std::to_string(limit));
  TokenSequence seq;
  seq.ids.assign(block_size, kPadId);
  seq.ids[0] = kClsId;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    seq.ids[i + 1] = vocab.id(tokens[i]);
  seq.content_len = static_cast<int>(tokens.size());
  seq.ids[seq.content_len + 1] = kEosId;
  return seq;
}

TokenSequence encode_smiles(std::string_view smiles, const Vocabulary &vocab,
                            int block_size) {
  const auto tokens = tokenize(smiles);
  return encode_sequence(tokens, vocab, block_size);
}

std::vector<std::string> decode(std::span<const int> ids,
                                const Vocabulary &vocab) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == kEosId)
      break;
    if (Vocabulary::is_special(ids[i]) || ids[i] >= vocab.size())
      continue;
    out.push_back(vocab.token(ids[i]));
  }
  return out;
}

std::string decode_smiles(std::span<const int> ids, const Vocabulary &vocab) {
  std::string s;
  for (const auto &t: decode(ids, vocab))
    s += t;
  return s;
}

void save_vocabulary(const Vocabulary &vocab,
                     const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::kFileNotFound, "cannot write " + path.string());
  for (const auto &t: vocab.tokens())
    out << t << '\n';
}

Vocabulary load_vocabulary(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kFileNotFound, path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty())
      lines.push_back(line);
  }
  if (lines.size() < kSpecialCount || lines[0] != kPadToken
      || lines[1] != kClsToken || lines[2] != kEosToken
      || lines[3] != kMaskToken)
    throw Error(ErrorCode::kParseError,
                path.string() + ": vocabulary must start with the specials");
  Vocabulary vocab;
  for (std::size_t i = kSpecialCount; i < lines.size(); ++i)
    vocab.add(lines[i]);
  return vocab;
}

std::vector<std::string> read_corpus(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kFileNotFound, path.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#')
      continue;
    const auto end = line.find_first_of(" \t\r", start);
    out.push_back(line.substr(start, end - start));
  }
  return out;
}

}  // namespace cardiogen::smiles
