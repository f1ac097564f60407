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
#include <filesystem>
#include <string>
#include <vector>

#include "pada/nets.hpp"
#include "pada/tensor.hpp"

namespace pada::io {

// Named-tensor container, little-endian:
//   magic "PADA", version u32, count u32, then per entry:
//   name_len u32, name bytes, dtype u8 (0=f64, 1=f32), rank u32,
//   dims u64[rank], raw data.
enum class Dtype : std::uint8_t { F64 = 0, F32 = 1 };

struct Entry {
  std::string name;
  num::Shape shape;
  std::vector<double> data;
};

void save_container(const std::filesystem::path& path,
                    const std::vector<Entry>& entries,
                    Dtype dtype = Dtype::F64);
std::vector<Entry> load_container(const std::filesystem::path& path);

void save_params(const std::filesystem::path& path, const nn::ParamSet& ps,
                 Dtype dtype = Dtype::F64);
// Loads by name into an existing ParamSet; shape mismatches are errors.
void load_params(const std::filesystem::path& path, nn::ParamSet& ps);

std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace pada::io
