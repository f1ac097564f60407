// Copyright 2026 The pada Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pada {

// Error taxonomy mirrors the CLI exit codes:
//   ValidationError -> 1, NumericalError -> 2, IoError -> 3.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pada

#define PADA_REQUIRE(cond, msg)                 \
  do {                                          \
    if (!(cond)) throw ::pada::ValidationError(msg); \
  } while (0)

#define PADA_NUMERIC(cond, msg)                \
  do {                                         \
    if (!(cond)) throw ::pada::NumericalError(msg); \
  } while (0)
