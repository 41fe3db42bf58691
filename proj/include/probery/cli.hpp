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

#include <iosfwd>
#include <span>
#include <string>

namespace probery {

/// Runs the command line; 0 on success, 1 on user error, 2 on internal or
/// storage error.
int run_cli(std::span<const std::string> args, std::ostream &out,
            std::ostream &err);

int run_cli(int argc, char **argv);

}  // namespace probery
