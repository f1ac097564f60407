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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pada/rng.hpp"
#include "pada/tensor.hpp"

namespace pada::corpus {

inline constexpr std::size_t kH = 24;
inline constexpr std::size_t kW = 24;
inline constexpr int kBins = 7;
inline constexpr int kFamilies = 2;
inline constexpr int kAnchors = kBins * kFamilies;

// Latent factors of one synthetic face proxy: a soft disc whose position,
// base radius and low-order outline shape identify the subject, plus a
// family marker pattern in the image corners.
struct Identity {
  double cx = 0.0, cy = 0.0;       // center offsets in [-0.2, 0.2]
  double r0 = 0.33;                // base radius in [0.28, 0.38]
  std::array<double, 4> shape{};   // outline coefficients in [-0.1, 0.1]
  int family = 0;                  // 0 = A, 1 = B
};

struct BinSpec {
  std::array<double, kBins + 1> edges{};  // strictly increasing, 0..1
  std::array<std::string, kAnchors> anchor_texts{};
  static BinSpec uniform7();
  // Index of the half-open bin containing age; the top edge is inclusive.
  int bin_of(double age) const;
};

inline int anchor_id(int bin, int family) { return bin * kFamilies + family; }
inline int anchor_bin(int id) { return id / kFamilies; }
inline int anchor_family(int id) { return id % kFamilies; }

struct Sample {
  std::size_t index = 0;
  Identity identity;
  double age = 0.0;
  int bin = 0;
  int anchor = 0;
  std::uint64_t texture_seed = 0;
  num::Tensor image;  // [1,kH,kW], values in [-1,1]
};

// Pure function of (identity, age, texture_seed). Age monotonically shrinks
// the disc radius (up to 15%), raises the ring-texture frequency and grows
// the seeded speckle amplitude; identity controls position/outline; family
// picks the corner marker pattern.
num::Tensor render(const Identity& id, double age, std::uint64_t texture_seed);

// n samples with ages uniform on [0,1], identity factors uniform in their
// ranges, family Bernoulli(1/2); per-index forked streams make generation
// order-independent.
std::vector<Sample> generate(std::size_t n, const num::Rng& rng,
                             const BinSpec& bins);

// Corner-marker statistic: positive for family A renders, negative for B.
double family_marker_stat(const num::Tensor& image);

void save_corpus(const std::filesystem::path& dir,
                 const std::vector<Sample>& samples);
std::vector<Sample> load_corpus(const std::filesystem::path& dir);

}  // namespace pada::corpus
