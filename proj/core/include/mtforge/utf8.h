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

#ifndef MTFORGE_UTF8_H_
#define MTFORGE_UTF8_H_

#include <string>
#include <string_view>
#include <vector>

namespace mtforge::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Lenient decoder: malformed sequences, surrogates and overlong forms each
// become one U+FFFD.
std::u32string Decode(std::string_view bytes);

std::string Encode(std::u32string_view codepoints);
void Append(std::string& out, char32_t cp);

// Splits into one string per codepoint, with the same leniency as Decode.
std::vector<std::string> SplitCodepoints(std::string_view bytes);

bool IsUnicodeSpace(char32_t cp);

// Splits on runs of ASCII space and tab. Used for word counts and LM/BPE
// tokenization, which all run on text that went through normalization.
std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace mtforge::utf8

#endif  // MTFORGE_UTF8_H_
