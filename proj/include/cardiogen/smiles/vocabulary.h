//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_SMILES_VOCABULARY_H_
#define CARDIOGEN_SMILES_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cardiogen::smiles {

inline constexpr int kBlockSize = 135;
inline constexpr int kMaxContentTokens = kBlockSize - 2;

inline constexpr int kPadId = 0;
inline constexpr int kClsId = 1;
inline constexpr int kEosId = 2;
inline constexpr int kMaskId = 3;
inline constexpr int kSpecialCount = 4;

inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kEosToken = "[EOS]";
inline constexpr std::string_view kMaskToken = "<MASK>";

class Vocabulary {
public:
  /// Specials only.
  Vocabulary();

  /// Appends a token; returns its id. Existing tokens keep their id.
  int add(std::string_view token, std::int64_t count = 0);

  int size() const noexcept { return static_cast<int>(tokens_.size()); }
  std::optional<int> find(std::string_view token) const;
  /// Throws TokenNotInVocabulary.
  int id(std::string_view token) const;
  const std::string &token(int id) const { return tokens_.at(id); }
  std::int64_t count(int id) const { return counts_.at(id); }
  std::span<const std::string> tokens() const noexcept { return tokens_; }

  static bool is_special(int id) noexcept {
    return id >= 0 && id < kSpecialCount;
  }

  bool operator==(const Vocabulary &other) const {
    return tokens_ == other.tokens_;
  }

private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

struct VocabularyBuild {
  Vocabulary vocab;
  /// Corpus indices of molecules holding at least one excluded token.
  std::vector<std::size_t> flagged;
  /// Corpus indices that failed to tokenize; also removed from the corpus.
  std::vector<std::size_t> untokenizable;
};

/// Counts tokens over the corpus and keeps those seen at least min_count
/// times, ordered lexicographically after the specials.
VocabularyBuild build_vocabulary(std::span<const std::string> corpus,
                                 std::int64_t min_count);

struct TokenSequence {
  std::vector<int> ids;
  int content_len = 0;
};

TokenSequence encode_sequence(std::span<const std::string> tokens,
                              const Vocabulary &vocab,
                              int block_size = kBlockSize);

/// Tokenizes then encodes.
TokenSequence encode_smiles(std::string_view smiles, const Vocabulary &vocab,
                            int block_size = kBlockSize);

/// Content tokens between [CLS] and the first [EOS], pads and specials
/// stripped.
std::vector<std::string> decode(std::span<const int> ids,
                                const Vocabulary &vocab);

std::string decode_smiles(std::span<const int> ids, const Vocabulary &vocab);

void save_vocabulary(const Vocabulary &vocab,
                     const std::filesystem::path &path);
Vocabulary load_vocabulary(const std::filesystem::path &path);

/// One SMILES per line; blank and '#' lines skipped; trailing fields after
/// whitespace ignored.
std::vector<std::string> read_corpus(const std::filesystem::path &path);

}  // namespace cardiogen::smiles

#endif  // CARDIOGEN_SMILES_VOCABULARY_H_
