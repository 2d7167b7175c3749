//
// Project cardiogen - Copyright 2026 cardiogen contributors.
// SPDX-License-Identifier: Apache-2.0
//

#include "cardiogen/io/checkpoint.h"

#include <bit>
#include <fstream>
#include <iterator>

#include "cardiogen/core/error.h"

namespace cardiogen::io {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out += static_cast<char>((v >> (8 * i)) & 0xffU);
}

void put_u64(std::string &out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    out += static_cast<char>((v >> (8 * i)) & 0xffU);
}

[[noreturn]] void corrupt(const std::string &what) {
  throw Error(ErrorCode::kCorruptCheckpoint, "corrupt checkpoint: " + what);
}

class Reader {
public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) { }

  std::string_view take(std::uint64_t n, const char *what) {
    if (n > bytes_.size() - pos_)
      corrupt(std::string("truncated ") + what);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint64_t uint(int width, const char *what) {
    const std::string_view s = take(width, what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[i]))
           << (8 * i);
    return v;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const TensorEntry *Checkpoint::find(std::string_view name) const {
  for (const TensorEntry &t: tensors)
    if (t.name == name)
      return &t;
  return nullptr;
}

std::string serialize_checkpoint(const Checkpoint &ckpt) {
  std::string out(kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  const std::string meta = ckpt.metadata.dump();
  put_u64(out, meta.size());
  out += meta;
  put_u64(out, ckpt.tensors.size());
  for (const TensorEntry &t: ckpt.tensors) {
    std::uint64_t n = 1;
    for (std::int64_t d: t.shape) {
      if (d < 0)
        throw Error(ErrorCode::kInvalidArgument, "negative dimension in " + t.name);
      n *= static_cast<std::uint64_t>(d);
    }
    if (n != t.data.size())
      throw Error(ErrorCode::kShapeMismatch,
                  "tensor " + t.name + " holds " + std::to_string(t.data.size())
                      + " values for " + std::to_string(n) + " slots");
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put_u32(out, kDtypeFloat32);
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::int64_t d: t.shape)
      put_u64(out, static_cast<std::uint64_t>(d));
    put_u64(out, 4 * n);
    for (float f: t.data)
      put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  Reader in(bytes);
  if (bytes.size() < kCheckpointMagic.size()
      || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    corrupt("bad magic");
  in.take(kCheckpointMagic.size(), "magic");
  const auto version = static_cast<std::uint32_t>(in.uint(4, "version"));
  if (version != kCheckpointVersion)
    throw Error(ErrorCode::kVersionMismatch,
                "checkpoint format version " + std::to_string(version)
                    + ", this build reads version "
                    + std::to_string(kCheckpointVersion));
  Checkpoint ckpt;
  const std::uint64_t meta_len = in.uint(8, "metadata length");
  const std::string_view meta = in.take(meta_len, "metadata");
  try {
    ckpt.metadata = nlohmann::json::parse(meta);
  } catch (const nlohmann::json::exception &e) {
    corrupt(std::string("metadata: ") + e.what());
  }
  const std::uint64_t count = in.uint(8, "tensor count");
  for (std::uint64_t k = 0; k < count; ++k) {
    TensorEntry t;
    const std::uint64_t name_len = in.uint(4, "name length");
    t.name = std::string(in.take(name_len, "name"));
    if (in.uint(4, "dtype") != kDtypeFloat32)
      corrupt("unknown dtype for " + t.name);
    const std::uint64_t rank = in.uint(4, "rank");
    std::uint64_t n = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
      const std::uint64_t d = in.uint(8, "dimension");
      if (d > (std::uint64_t { 1 } << 40))
        corrupt("implausible dimension for " + t.name);
      t.shape.push_back(static_cast<std::int64_t>(d));
      n *= d;
      if (n > (std::uint64_t { 1 } << 40))
        corrupt("implausible size for " + t.name);
    }
    const std::uint64_t payload = in.uint(8, "payload length");
    if (payload != 4 * n)
      corrupt("payload length of " + t.name + " does not match its shape");
    const std::string_view raw = in.take(payload, "payload");
    t.data.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b]))
             << (8 * b);
      t.data[i] = std::bit_cast<float>(v);
    }
    ckpt.tensors.push_back(std::move(t));
  }
  if (!in.done())
    corrupt("trailing bytes");
  return ckpt;
}

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path) {
  const std::string bytes = serialize_checkpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::kFileNotFound, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw Error(ErrorCode::kFileNotFound, "write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kFileNotFound, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const Error &e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace cardiogen::io
