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

#include <cstdint>

namespace pada::num {

// Counter-based generator: output i is a hash of (key, i), so streams can be
// forked by index and consumed in any order without changing the values each
// stream yields. Identical seed + identical call sequence => identical output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Standard normal via Box-Muller; consumes two uniforms per call.
  double gaussian();
  // Independent stream derived from this generator's key and `stream`.
  // The fork starts at counter zero and does not advance this generator.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t key() const { return key_; }

 private:
  Rng() = default;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

// SplitMix64 finalizer; also used on its own for cheap stateless hashing.
std::uint64_t mix64(std::uint64_t x);

}  // namespace pada::num
