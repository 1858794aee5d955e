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

#include "mtforge/records.h"

#include <cmath>

#include "mtforge/error.h"
#include "mtforge/strings.h"

namespace mtforge {

ParallelRecord ParsePairTsv(std::string_view line, std::string_view src_lang,
                            std::string_view tgt_lang, std::string_view origin,
                            uint64_t line_no) {
  const auto fields = SplitOn(line, "\t");
  if (fields.size() < 2 || fields.size() > 3) {
    throw DataError("malformed_tsv", "line " + std::to_string(line_no) +
                                         ": expected 2 or 3 tab-separated "
                                         "fields");
  }
  ParallelRecord pair;
  pair.src = {std::string(fields[0]), std::string(src_lang),
              std::string(origin), line_no};
  pair.tgt = {std::string(fields[1]), std::string(tgt_lang),
              std::string(origin), line_no};
  if (fields.size() == 3) {
    const auto score = ParseDouble(fields[2]);
    if (!score || !std::isfinite(*score)) {
      throw DataError("malformed_tsv", "line " + std::to_string(line_no) +
                                           ": score is not a finite number");
    }
    pair.score = *score;
  }
  return pair;
}

std::string FormatPairTsv(const ParallelRecord& pair) {
  std::string out = pair.src.text;
  out += '\t';
  out += pair.tgt.text;
  if (pair.score) {
    out += '\t';
    out += FormatDouble(*pair.score);
  }
  return out;
}

}  // namespace mtforge
