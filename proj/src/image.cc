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

#include "ttscale/image.h"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "image_internal.h"
#include "ttscale/core.h"
#include "ttscale/random.h"

namespace ttscale {

std::uint64_t Image::Fingerprint() const {
  StableHasher h;
  h.UpdateU64(static_cast<std::uint64_t>(height));
  h.UpdateU64(static_cast<std::uint64_t>(width));
  h.Update(pixels.data(), pixels.size());
  return h.digest();
}

namespace internal {

cv::Mat ToMat(const Image& image) {
  cv::Mat mat(image.height, image.width, CV_8UC3);
  std::memcpy(mat.data, image.pixels.data(), image.pixels.size());
  return mat;
}

Image FromMat(const cv::Mat& mat) {
  cv::Mat rgb;
  if (mat.type() == CV_8UC3) {
    rgb = mat.isContinuous() ? mat : mat.clone();
  } else {
    mat.convertTo(rgb, CV_8UC3);
  }
  Image out(rgb.rows, rgb.cols);
  std::memcpy(out.pixels.data(), rgb.data, out.pixels.size());
  return out;
}

}  // namespace internal

namespace {

Image FromBgr(const cv::Mat& decoded, const std::string& what) {
  if (decoded.empty()) throw Error(ErrorCode::kIo, "cannot decode " + what);
  cv::Mat rgb;
  switch (decoded.channels()) {
    case 1: cv::cvtColor(decoded, rgb, cv::COLOR_GRAY2RGB); break;
    case 4: cv::cvtColor(decoded, rgb, cv::COLOR_BGRA2RGB); break;
    default: cv::cvtColor(decoded, rgb, cv::COLOR_BGR2RGB); break;
  }
  return internal::FromMat(rgb);
}

}  // namespace

Image LoadImage(const std::filesystem::path& path) {
  return FromBgr(cv::imread(path.string(), cv::IMREAD_COLOR), path.string());
}

Image DecodeImage(const std::vector<std::uint8_t>& encoded) {
  return FromBgr(cv::imdecode(encoded, cv::IMREAD_COLOR), "image bytes");
}

std::vector<std::uint8_t> EncodePng(const Image& image) {
  if (image.empty()) throw Error(ErrorCode::kEmptyImage, "cannot encode");
  cv::Mat bgr;
  cv::cvtColor(internal::ToMat(image), bgr, cv::COLOR_RGB2BGR);
  std::vector<std::uint8_t> out;
  if (!cv::imencode(".png", bgr, out)) {
    throw Error(ErrorCode::kIo, "png encoding failed");
  }
  return out;
}

void SavePng(const Image& image, const std::filesystem::path& path) {
  if (image.empty()) throw Error(ErrorCode::kEmptyImage, "cannot save");
  cv::Mat bgr;
  cv::cvtColor(internal::ToMat(image), bgr, cv::COLOR_RGB2BGR);
  if (!cv::imwrite(path.string(), bgr)) {
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  }
}

}  // namespace ttscale
