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

#include "pada/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "pada/checkpoint.hpp"
#include "pada/errors.hpp"

namespace pada::corpus {

using json = nlohmann::json;

BinSpec BinSpec::uniform7() {
  BinSpec b;
  for (int i = 0; i <= kBins; ++i)
    b.edges[i] = static_cast<double>(i) / kBins;
  b.edges[kBins] = 1.0;
  for (int bin = 0; bin < kBins; ++bin)
    for (int fam = 0; fam < kFamilies; ++fam)
      b.anchor_texts[anchor_id(bin, fam)] =
          "age-band-" + std::to_string(bin) + "/family-" +
          (fam == 0 ? std::string("A") : std::string("B"));
  return b;
}

int BinSpec::bin_of(double age) const {
  PADA_REQUIRE(age >= edges.front() && age <= edges.back(),
               "bin_of: age " + std::to_string(age) + " outside [" +
                   std::to_string(edges.front()) + "," +
                   std::to_string(edges.back()) + "]");
  for (int k = 0; k < kBins; ++k)
    if (age < edges[k + 1]) return k;
  return kBins - 1;  // top edge inclusive
}

namespace {

constexpr double kBackground = -0.85;
constexpr double kDiscLevel = 0.45;   // interior level above background
constexpr double kRingAmp = 0.22;
constexpr double kEdgeWidth = 0.06;
constexpr double kMarker = 0.9;
constexpr std::size_t kMarkerSize = 3;
constexpr std::size_t kMarkerOff = 1;

double speckle(std::uint64_t seed, std::size_t idx) {
  const std::uint64_t h = num::mix64(seed ^ num::mix64(idx + 0x9E3779B9ull));
  return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

void stamp_block(num::Tensor& img, std::size_t r0, std::size_t c0, double v) {
  for (std::size_t i = 0; i < kMarkerSize; ++i)
    for (std::size_t j = 0; j < kMarkerSize; ++j)
      img.raw()[(r0 + i) * kW + (c0 + j)] = v;
}

}  // namespace

num::Tensor render(const Identity& id, double age,
                   std::uint64_t texture_seed) {
  PADA_REQUIRE(age >= 0.0 && age <= 1.0,
               "render: age " + std::to_string(age) + " outside [0,1]");
  num::Tensor img = num::Tensor::zeros({1, kH, kW});
  const double shrink = 1.0 - 0.15 * age;
  const double freq = 2.0 + 6.0 * age;              // ring cycles over radius
  const double speckle_amp = 0.05 + 0.25 * age;     // the "wrinkle" analog
  for (std::size_t i = 0; i < kH; ++i) {
    const double y = (static_cast<double>(i) + 0.5) / kH * 2.0 - 1.0;
    for (std::size_t j = 0; j < kW; ++j) {
      const double x = (static_cast<double>(j) + 0.5) / kW * 2.0 - 1.0;
      const double dx = x - id.cx, dy = y - id.cy;
      const double d = std::hypot(dx, dy);
      const double th = std::atan2(dy, dx);
      const double radius =
          id.r0 * shrink *
          (1.0 + id.shape[0] * std::cos(th) + id.shape[1] * std::sin(th) +
           id.shape[2] * std::cos(2.0 * th) + id.shape[3] * std::sin(2.0 * th));
      const double inside =
          0.5 * (1.0 + std::tanh((radius - d) / kEdgeWidth));
      const double ring =
          std::cos(2.0 * std::numbers::pi * freq * d / radius);
      const double noise = speckle(texture_seed, i * kW + j);
      double v = kBackground +
                 inside * (kDiscLevel - kBackground + kRingAmp * ring +
                           speckle_amp * noise);
      img.raw()[i * kW + j] = std::clamp(v, -1.0, 1.0);
    }
  }
  // Family marker: A lights the top corners, B the bottom corners.
  const double top = id.family == 0 ? kMarker : -kMarker;
  stamp_block(img, kMarkerOff, kMarkerOff, top);
  stamp_block(img, kMarkerOff, kW - kMarkerOff - kMarkerSize, top);
  stamp_block(img, kH - kMarkerOff - kMarkerSize, kMarkerOff, -top);
  stamp_block(img, kH - kMarkerOff - kMarkerSize, kW - kMarkerOff - kMarkerSize,
              -top);
  return img;
}

double family_marker_stat(const num::Tensor& image) {
  auto block_mean = [&](std::size_t r0, std::size_t c0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < kMarkerSize; ++i)
      for (std::size_t j = 0; j < kMarkerSize; ++j)
        acc += image.data()[(r0 + i) * kW + (c0 + j)];
    return acc / (kMarkerSize * kMarkerSize);
  };
  const double top = block_mean(kMarkerOff, kMarkerOff) +
                     block_mean(kMarkerOff, kW - kMarkerOff - kMarkerSize);
  const double bottom =
      block_mean(kH - kMarkerOff - kMarkerSize, kMarkerOff) +
      block_mean(kH - kMarkerOff - kMarkerSize, kW - kMarkerOff - kMarkerSize);
  return 0.5 * (top - bottom);
}

std::vector<Sample> generate(std::size_t n, const num::Rng& rng,
                             const BinSpec& bins) {
  PADA_REQUIRE(n >= 1, "generate: n must be >= 1");
  std::vector<Sample> out(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    num::Rng r = rng.fork(static_cast<std::uint64_t>(k));
    Sample& s = out[static_cast<std::size_t>(k)];
    s.index = static_cast<std::size_t>(k);
    s.age = r.uniform();
    s.identity.cx = (r.uniform() * 2.0 - 1.0) * 0.2;
    s.identity.cy = (r.uniform() * 2.0 - 1.0) * 0.2;
    s.identity.r0 = 0.28 + r.uniform() * 0.10;
    for (auto& c : s.identity.shape) c = (r.uniform() * 2.0 - 1.0) * 0.1;
    s.identity.family = r.uniform() < 0.5 ? 0 : 1;
    s.texture_seed = r.next_u64();
    s.bin = bins.bin_of(s.age);
    s.anchor = anchor_id(s.bin, s.identity.family);
    s.image = render(s.identity, s.age, s.texture_seed);
  }
  return out;
}

void save_corpus(const std::filesystem::path& dir,
                 const std::vector<Sample>& samples) {
  std::filesystem::create_directories(dir);
  std::ofstream mf(dir / "manifest.jsonl");
  if (!mf) throw IoError("save_corpus: cannot write manifest in " +
                         dir.string());
  for (const Sample& s : samples) {
    json j{{"index", s.index},
           {"cx", s.identity.cx},
           {"cy", s.identity.cy},
           {"r0", s.identity.r0},
           {"shape", s.identity.shape},
           {"family", s.identity.family == 0 ? "A" : "B"},
           {"age", s.age},
           {"bin", s.bin},
           {"anchor_id", s.anchor},
           {"seed", std::to_string(s.texture_seed)}};
    mf << j.dump() << "\n";
  }
  io::Entry images;
  images.name = "images";
  images.shape = {samples.size(), 1, kH, kW};
  images.data.reserve(samples.size() * kH * kW);
  for (const Sample& s : samples)
    images.data.insert(images.data.end(), s.image.data().begin(),
                       s.image.data().end());
  io::save_container(dir / "images.pada", {images});
}

std::vector<Sample> load_corpus(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.jsonl");
  if (!mf) throw IoError("load_corpus: cannot open manifest in " +
                         dir.string());
  auto entries = io::load_container(dir / "images.pada");
  PADA_REQUIRE(entries.size() == 1 && entries[0].name == "images",
               "load_corpus: malformed image container");
  const auto& images = entries[0];
  const std::size_t n = images.shape.at(0);
  std::vector<Sample> out;
  out.reserve(n);
  std::string line;
  while (std::getline(mf, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    Sample s;
    s.index = j.at("index").get<std::size_t>();
    s.identity.cx = j.at("cx").get<double>();
    s.identity.cy = j.at("cy").get<double>();
    s.identity.r0 = j.at("r0").get<double>();
    auto sh = j.at("shape");
    for (std::size_t i = 0; i < 4; ++i) s.identity.shape[i] = sh.at(i);
    s.identity.family = j.at("family").get<std::string>() == "A" ? 0 : 1;
    s.age = j.at("age").get<double>();
    s.bin = j.at("bin").get<int>();
    s.anchor = j.at("anchor_id").get<int>();
    s.texture_seed = std::stoull(j.at("seed").get<std::string>());
    PADA_REQUIRE(s.index < n, "load_corpus: index out of range");
    const double* base = images.data.data() + s.index * kH * kW;
    s.image = num::Tensor::from(
        {1, kH, kW}, std::vector<double>(base, base + kH * kW));
    out.push_back(std::move(s));
  }
  PADA_REQUIRE(out.size() == n,
               "load_corpus: manifest/images count mismatch");
  return out;
}

}  // namespace pada::corpus
