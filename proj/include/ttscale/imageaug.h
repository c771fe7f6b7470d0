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

#ifndef TTSCALE_IMAGEAUG_H_
#define TTSCALE_IMAGEAUG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/image.h"

namespace ttscale {

inline constexpr std::uint8_t kFillValue = 144;
inline constexpr double kDefaultApplyProb = 0.5;
inline constexpr int kTransformsPerImage = 3;

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct NamedRange {
  std::string name;
  ParamRange range;
};

struct TransformSpec {
  std::string name;
  std::vector<NamedRange> params;
  double apply_prob = kDefaultApplyProb;

  // Range of parameter `key`; NOT_FOUND if absent.
  const ParamRange& param(const std::string& key) const;
};

// Transform table for one strength. Entries without an explicit
// probability use kDefaultApplyProb.
const std::vector<TransformSpec>& Catalog(ImageStrength strength);

struct PlannedTransform {
  int index = 0;  // into Catalog(strength)
  bool applied = false;
  std::uint64_t seed = 0;
};

// Three distinct catalog entries in draw order, each with its coin flip and
// its own parameter seed.
std::vector<PlannedTransform> PlanImageAug(ImageStrength strength,
                                           std::uint64_t seed);

// Runs one transform with parameters drawn from `seed`.
Image ApplyTransform(const Image& image, const TransformSpec& spec,
                     std::uint64_t seed);

// EMPTY_IMAGE for a zero-sized input.
Image ApplyImageAug(const Image& image, ImageStrength strength,
                    std::uint64_t seed);

}  // namespace ttscale

#endif  // TTSCALE_IMAGEAUG_H_
