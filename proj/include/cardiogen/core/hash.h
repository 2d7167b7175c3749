//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CARDIOGEN_CORE_HASH_H_
#define CARDIOGEN_CORE_HASH_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace cardiogen {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

/// Incremental 64-bit FNV-1a. Integers are fed little-endian byte by byte so
/// the digest does not depend on host byte order.
class Fnv1a {
public:
  Fnv1a &bytes(std::span<const unsigned char> data) noexcept {
    for (unsigned char c: data) {
      state_ ^= c;
      state_ *= kFnvPrime;
    }
    return *this;
  }

  Fnv1a &text(std::string_view s) noexcept {
    for (char c: s) {
      state_ ^= static_cast<unsigned char>(c);
      state_ *= kFnvPrime;
    }
    return *this;
  }

  Fnv1a &u64(std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffU;
      state_ *= kFnvPrime;
    }
    return *this;
  }

  Fnv1a &i64(std::int64_t v) noexcept {
    return u64(static_cast<std::uint64_t>(v));
  }

  std::uint64_t digest() const noexcept { return state_; }

private:
  std::uint64_t state_ = kFnvOffset;
};

inline std::uint64_t fnv1a(std::string_view s) noexcept {
  return Fnv1a().text(s).digest();
}

}  // namespace cardiogen

#endif  // CARDIOGEN_CORE_HASH_H_
