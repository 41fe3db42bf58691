// Copyright 2026 The Probery Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace probery {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateSegmentation,
  kMissingValue,
  kAlreadyExists,
  kInvalidConfig,
  kStorage,
  kCorruption,
  kSyntax,
  kRange,
  kPlanning,
};

std::string_view error_code_name(ErrorCode code);

// User errors map to CLI exit code 1; storage/corruption map to 2.
bool is_user_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DegenerateSegmentationError : public Error {
 public:
  DegenerateSegmentationError(std::size_t requested, std::size_t achievable);

  std::size_t requested() const noexcept { return requested_; }
  std::size_t achievable() const noexcept { return achievable_; }

 private:
  std::size_t requested_;
  std::size_t achievable_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string &message);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class StorageError : public Error {
 public:
  StorageError(ErrorCode code, std::string path, const std::string &message);

  const std::string &path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace probery
