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

#ifndef MTFORGE_ERROR_H_
#define MTFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace mtforge {

// Every failure raised by the library is an Error. The kind decides the
// process exit status in the CLI (config -> 2, data and io -> 1); the code is
// a short machine-readable tag that ends up in `error=<code>` log lines.
enum class ErrorKind { kConfig, kData, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string code, const std::string& message)
      : Error(ErrorKind::kConfig, std::move(code), message) {}
};

class DataError : public Error {
 public:
  DataError(std::string code, const std::string& message)
      : Error(ErrorKind::kData, std::move(code), message) {}
};

class IoError : public Error {
 public:
  IoError(std::string code, const std::string& message)
      : Error(ErrorKind::kIo, std::move(code), message) {}
};

}  // namespace mtforge

#endif  // MTFORGE_ERROR_H_
