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

#include "pada/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "pada/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace pada::io {

namespace {

constexpr char kMagic[4] = {'P', 'A', 'D', 'A'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("container: truncated file");
  return v;
}

}  // namespace

void save_container(const std::filesystem::path& path,
                    const std::vector<Entry>& entries, Dtype dtype) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("container: cannot open for write: " + path.string());
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(entries.size()));
  for (const Entry& e : entries) {
    PADA_REQUIRE(num::shape_numel(e.shape) == e.data.size(),
                 "container: entry '" + e.name + "' shape/data mismatch");
    put<std::uint32_t>(os, static_cast<std::uint32_t>(e.name.size()));
    os.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put<std::uint8_t>(os, static_cast<std::uint8_t>(dtype));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(e.shape.size()));
    for (auto d : e.shape) put<std::uint64_t>(os, d);
    if (dtype == Dtype::F64) {
      os.write(reinterpret_cast<const char*>(e.data.data()),
               static_cast<std::streamsize>(e.data.size() * sizeof(double)));
    } else {
      std::vector<float> f(e.data.begin(), e.data.end());
      os.write(reinterpret_cast<const char*>(f.data()),
               static_cast<std::streamsize>(f.size() * sizeof(float)));
    }
  }
  if (!os) throw IoError("container: write failed: " + path.string());
}

std::vector<Entry> load_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("container: cannot open: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("container: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion)
    throw IoError("container: unsupported version " + std::to_string(version));
  const auto count = get<std::uint32_t>(is);
  std::vector<Entry> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Entry e;
    const auto name_len = get<std::uint32_t>(is);
    e.name.resize(name_len);
    is.read(e.name.data(), name_len);
    const auto dtype = static_cast<Dtype>(get<std::uint8_t>(is));
    const auto rank = get<std::uint32_t>(is);
    e.shape.resize(rank);
    for (auto& d : e.shape) d = get<std::uint64_t>(is);
    const std::size_t n = num::shape_numel(e.shape);
    e.data.resize(n);
    if (dtype == Dtype::F64) {
      is.read(reinterpret_cast<char*>(e.data.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    } else {
      std::vector<float> f(n);
      is.read(reinterpret_cast<char*>(f.data()),
              static_cast<std::streamsize>(n * sizeof(float)));
      for (std::size_t j = 0; j < n; ++j) e.data[j] = f[j];
    }
    if (!is) throw IoError("container: truncated entry in " + path.string());
    out.push_back(std::move(e));
  }
  return out;
}

void save_params(const std::filesystem::path& path, const nn::ParamSet& ps,
                 Dtype dtype) {
  std::vector<Entry> entries;
  entries.reserve(ps.items().size());
  for (const auto& it : ps.items())
    entries.push_back({it.name, it.t.shape(), it.t.data()});
  save_container(path, entries, dtype);
}

void load_params(const std::filesystem::path& path, nn::ParamSet& ps) {
  auto entries = load_container(path);
  for (const Entry& e : entries) {
    num::Tensor* t = ps.find(e.name);
    if (t == nullptr)
      throw IoError("checkpoint: unknown parameter '" + e.name + "'");
    PADA_REQUIRE(t->shape() == e.shape,
                 "checkpoint: shape mismatch for '" + e.name + "': " +
                     num::shape_str(t->shape()) + " vs " +
                     num::shape_str(e.shape));
    t->raw() = e.data;
  }
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("fnv1a: cannot open: " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ull;
  char buf[4096];
  while (is) {
    is.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

}  // namespace pada::io
