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


// Language-specific output punctuation.
//
// cs, de, is: straight double quotes alternate between U+201E (opening) and
// U+201C (closing), left to right within a line. An unpaired final quote is
// left as is.
//
// ja, zh: ASCII , ? ! : ; ( ) become their full-width forms, and a period
// followed by a space or the end of the line becomes U+3002. Spaces directly
// after a converted mark are dropped. Periods inside numbers never match.
//
// Every other language passes through unchanged.

#ifndef MTFORGE_POSTPROCESS_H_
#define MTFORGE_POSTPROCESS_H_

#include <string>
#include <string_view>
#include <vector>

namespace mtforge::postprocess {

enum class QuoteStyle { kNone, kGermanDouble };

struct PunctRule {
  char32_t from;
  char32_t to;
  std::string_view condition;  // empty when unconditional
};

struct PunctTable {
  std::string lang;
  QuoteStyle quote_style = QuoteStyle::kNone;
  std::vector<PunctRule> rules;
};

// The table for `lang`; an empty rule list and kNone for pass-through tags.
PunctTable TableFor(std::string_view lang);

// Tags with a non-trivial table.
std::vector<std::string> SupportedLanguages();

// Applies the table to one line. Works on bytes, so invalid UTF-8 outside the
// mapped ASCII characters is preserved.
std::string Postprocess(std::string_view line, std::string_view lang);

// TSV: lang, from, to, condition, with codepoints written as U+XXXX.
std::string PrintTable(std::string_view lang);

}  // namespace mtforge::postprocess

#endif  // MTFORGE_POSTPROCESS_H_
