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

#include "pada/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pada/errors.hpp"

namespace pada::io {

void write_pgm(const std::filesystem::path& path, const num::Tensor& image) {
  PADA_REQUIRE(image.rank() == 3 && image.shape()[0] == 1,
               "write_pgm: expected [1,H,W] image, got " +
                   num::shape_str(image.shape()));
  const std::size_t h = image.shape()[1], w = image.shape()[2];
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_pgm: cannot open " + path.string());
  os << "P5\n" << w << " " << h << "\n255\n";
  for (double v : image.data()) {
    const double mapped = std::clamp((v + 1.0) * 0.5, 0.0, 1.0) * 255.0;
    const unsigned char byte =
        static_cast<unsigned char>(std::lround(mapped));
    os.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!os) throw IoError("write_pgm: write failed: " + path.string());
}

num::Tensor read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_pgm: cannot open " + path.string());
  std::string magic;
  is >> magic;
  if (magic != "P5") throw IoError("read_pgm: not a P5 file: " + path.string());
  std::size_t w = 0, h = 0, maxval = 0;
  is >> w >> h >> maxval;
  if (!is || maxval == 0 || maxval > 255)
    throw IoError("read_pgm: bad header in " + path.string());
  is.get();  // single whitespace after maxval
  num::Tensor img = num::Tensor::zeros({1, h, w});
  std::vector<unsigned char> buf(w * h);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (!is) throw IoError("read_pgm: truncated data in " + path.string());
  for (std::size_t i = 0; i < buf.size(); ++i)
    img.raw()[i] =
        static_cast<double>(buf[i]) / static_cast<double>(maxval) * 2.0 - 1.0;
  return img;
}

}  // namespace pada::io
