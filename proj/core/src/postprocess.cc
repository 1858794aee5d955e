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


#include "mtforge/postprocess.h"

#include <cstdio>

#include "mtforge/utf8.h"

namespace mtforge::postprocess {
namespace {

constexpr char32_t kLowQuote = 0x201E;
constexpr char32_t kHighQuote = 0x201C;
constexpr std::string_view kPeriodCondition = "before_space_or_eol";

bool IsQuoteLang(std::string_view lang) {
  return lang == "cs" || lang == "de" || lang == "is";
}

bool IsCjkLang(std::string_view lang) { return lang == "zh" || lang == "ja"; }

const std::vector<PunctRule>& CjkRules() {
  static const std::vector<PunctRule> rules = {
      {U',', 0xFF0C, ""},  {U'.', 0x3002, kPeriodCondition},
      {U'?', 0xFF1F, ""},  {U'!', 0xFF01, ""},
      {U':', 0xFF1A, ""},  {U';', 0xFF1B, ""},
      {U'(', 0xFF08, ""},  {U')', 0xFF09, ""},
  };
  return rules;
}

char32_t CjkTarget(std::string_view line, size_t i) {
  const char c = line[i];
  if (c == '.') {
    const bool at_end = i + 1 == line.size();
    return at_end || line[i + 1] == ' ' ? 0x3002 : 0;
  }
  for (const auto& rule : CjkRules()) {
    if (rule.condition.empty() && rule.from == static_cast<char32_t>(c)) {
      return rule.to;
    }
  }
  return 0;
}

std::string Quotes(std::string_view line) {
  size_t count = 0;
  for (char c : line) count += c == '"';
  const size_t convertible = count - count % 2;
  std::string out;
  out.reserve(line.size() + 2 * convertible);
  size_t seen = 0;
  for (char c : line) {
    if (c == '"' && seen < convertible) {
      utf8::Append(out, seen % 2 == 0 ? kLowQuote : kHighQuote);
      ++seen;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string Cjk(std::string_view line) {
  std::string out;
  out.reserve(line.size() * 2);
  size_t i = 0;
  while (i < line.size()) {
    const char32_t target = CjkTarget(line, i);
    if (target == 0) {
      out.push_back(line[i++]);
      continue;
    }
    utf8::Append(out, target);
    ++i;
    while (i < line.size() && line[i] == ' ') ++i;
  }
  return out;
}

std::string Hex(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "U+%04X", static_cast<unsigned>(cp));
  return buf;
}

}  // namespace

PunctTable TableFor(std::string_view lang) {
  PunctTable table;
  table.lang = std::string(lang);
  if (IsQuoteLang(lang)) {
    table.quote_style = QuoteStyle::kGermanDouble;
    table.rules = {{U'"', kLowQuote, "opening"}, {U'"', kHighQuote, "closing"}};
  } else if (IsCjkLang(lang)) {
    table.rules = CjkRules();
  }
  return table;
}

std::vector<std::string> SupportedLanguages() {
  return {"cs", "de", "is", "ja", "zh"};
}

std::string Postprocess(std::string_view line, std::string_view lang) {
  if (IsQuoteLang(lang)) return Quotes(line);
  if (IsCjkLang(lang)) return Cjk(line);
  return std::string(line);
}

std::string PrintTable(std::string_view lang) {
  const PunctTable table = TableFor(lang);
  std::string out = "lang\tfrom\tto\tcondition\n";
  for (const auto& rule : table.rules) {
    out += table.lang + "\t" + Hex(rule.from) + "\t" + Hex(rule.to) + "\t" +
           (rule.condition.empty() ? "always" : std::string(rule.condition)) +
           "\n";
  }
  return out;
}

}  // namespace mtforge::postprocess
