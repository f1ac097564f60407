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

#include <filesystem>

#include "pada/tensor.hpp"

namespace pada::io {

// P5 PGM, maxval 255, values mapped [-1,1] -> [0,255] (clamped).
void write_pgm(const std::filesystem::path& path, const num::Tensor& image);
// Inverse mapping back to a [1,H,W] tensor in [-1,1].
num::Tensor read_pgm(const std::filesystem::path& path);

}  // namespace pada::io
