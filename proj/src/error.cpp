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

#include "probery/error.hpp"

namespace probery {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDegenerateSegmentation: return "degenerate-segmentation";
    case ErrorCode::kMissingValue: return "missing-value";
    case ErrorCode::kAlreadyExists: return "already-exists";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kStorage: return "storage";
    case ErrorCode::kCorruption: return "storage-corruption";
    case ErrorCode::kSyntax: return "syntax";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kPlanning: return "planning";
  }
  return "unknown";
}

bool is_user_error(ErrorCode code) {
  return code != ErrorCode::kStorage && code != ErrorCode::kCorruption;
}

DegenerateSegmentationError::DegenerateSegmentationError(
    std::size_t requested, std::size_t achievable)
    : Error(ErrorCode::kDegenerateSegmentation,
            "cannot build " + std::to_string(requested) +
                " segments: at most " + std::to_string(achievable) +
                " achievable"),
      requested_(requested),
      achievable_(achievable) {}

SyntaxError::SyntaxError(std::size_t position, const std::string &message)
    : Error(ErrorCode::kSyntax,
            "syntax error at position " + std::to_string(position) + ": " +
                message),
      position_(position) {}

StorageError::StorageError(ErrorCode code, std::string path,
                           const std::string &message)
    : Error(code, message + ": " + path), path_(std::move(path)) {}

}  // namespace probery
