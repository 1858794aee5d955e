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

#ifndef MTFORGE_RECORDS_H_
#define MTFORGE_RECORDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mtforge {

// One line of monolingual text. `text` never contains a newline.
struct SentenceRecord {
  std::string text;
  std::string lang;
  std::string origin;
  uint64_t line_no = 0;

  friend bool operator==(const SentenceRecord&,
                         const SentenceRecord&) = default;
};

// An aligned pair. `score` carries a mining or alignment score when the
// source provides one and is always finite when present.
struct ParallelRecord {
  SentenceRecord src;
  SentenceRecord tgt;
  std::optional<double> score;

  friend bool operator==(const ParallelRecord&,
                         const ParallelRecord&) = default;
};

// Parses `src TAB tgt [TAB score]`. Throws DataError on a malformed line or a
// non-finite score.
ParallelRecord ParsePairTsv(std::string_view line, std::string_view src_lang,
                            std::string_view tgt_lang, std::string_view origin,
                            uint64_t line_no);

std::string FormatPairTsv(const ParallelRecord& pair);

}  // namespace mtforge

#endif  // MTFORGE_RECORDS_H_
