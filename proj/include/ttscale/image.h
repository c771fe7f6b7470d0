// Copyright 2026 The ttscale Authors.
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

#ifndef TTSCALE_IMAGE_H_
#define TTSCALE_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ttscale {

// Interleaved 8-bit RGB raster, row-major, H x W x 3.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int h, int w, std::uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<size_t>(h) * w * 3, fill) {}

  bool empty() const { return height <= 0 || width <= 0; }

  std::uint8_t& at(int y, int x, int c) {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  std::uint8_t at(int y, int x, int c) const {
    return pixels[(static_cast<size_t>(y) * width + x) * 3 + c];
  }

  // Stable 64-bit hash of the dimensions and pixel bytes.
  std::uint64_t Fingerprint() const;

  friend bool operator==(const Image&, const Image&) = default;
};

// Decodes PNG/JPEG/etc. into 8-bit RGB. Throws IO on failure.
Image LoadImage(const std::filesystem::path& path);
Image DecodeImage(const std::vector<std::uint8_t>& encoded);
std::vector<std::uint8_t> EncodePng(const Image& image);
void SavePng(const Image& image, const std::filesystem::path& path);

}  // namespace ttscale

#endif  // TTSCALE_IMAGE_H_
