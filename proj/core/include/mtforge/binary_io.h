// Copyright 2026 The mtforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian primitives shared by the binary containers (LM, LID,
// embeddings, checkpoints). Byte order is explicit so files are portable
// regardless of host endianness.

#ifndef MTFORGE_BINARY_IO_H_
#define MTFORGE_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "mtforge/error.h"

namespace mtforge::binio {

template <typename UInt>
void WriteUint(std::ostream& out, UInt value) {
  char buf[sizeof(UInt)];
  for (size_t i = 0; i < sizeof(UInt); ++i) {
    buf[i] = static_cast<char>((static_cast<uint64_t>(value) >> (8 * i)) & 0xFF);
  }
  out.write(buf, sizeof(UInt));
}

template <typename UInt>
UInt ReadUint(std::istream& in) {
  unsigned char buf[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(UInt))) {
    throw DataError("truncated_file", "unexpected end of binary input");
  }
  uint64_t value = 0;
  for (size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<uint64_t>(buf[i]) << (8 * i);
  }
  return static_cast<UInt>(value);
}

inline void WriteF64(std::ostream& out, double v) {
  WriteUint<uint64_t>(out, std::bit_cast<uint64_t>(v));
}
inline double ReadF64(std::istream& in) {
  return std::bit_cast<double>(ReadUint<uint64_t>(in));
}
inline void WriteF32(std::ostream& out, float v) {
  WriteUint<uint32_t>(out, std::bit_cast<uint32_t>(v));
}
inline float ReadF32(std::istream& in) {
  return std::bit_cast<float>(ReadUint<uint32_t>(in));
}

inline void WriteString(std::ostream& out, std::string_view s) {
  WriteUint<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string ReadString(std::istream& in, size_t max_len = 1 << 24) {
  const auto len = ReadUint<uint32_t>(in);
  if (len > max_len) throw DataError("corrupt_file", "string length too large");
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) {
    throw DataError("truncated_file", "unexpected end of binary input");
  }
  return s;
}

inline void WriteMagic(std::ostream& out, std::string_view magic) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
}

inline void ExpectMagic(std::istream& in, std::string_view magic) {
  std::string got(magic.size(), '\0');
  if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) ||
      got != magic) {
    throw DataError("bad_magic",
                    "expected file magic '" + std::string(magic) + "'");
  }
}

}  // namespace mtforge::binio

#endif  // MTFORGE_BINARY_IO_H_
