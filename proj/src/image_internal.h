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

#ifndef TTSCALE_SRC_IMAGE_INTERNAL_H_
#define TTSCALE_SRC_IMAGE_INTERNAL_H_

#include <cstring>

#include <opencv2/core.hpp>

#include "ttscale/image.h"

namespace ttscale::internal {

// RGB byte order is kept in the Mat; channel semantics are the caller's.
cv::Mat ToMat(const Image& image);
Image FromMat(const cv::Mat& mat);

}  // namespace ttscale::internal

#endif  // TTSCALE_SRC_IMAGE_INTERNAL_H_
