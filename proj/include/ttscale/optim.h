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

#ifndef TTSCALE_OPTIM_H_
#define TTSCALE_OPTIM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "ttscale/generator.h"

namespace ttscale {

// First and second moment buffers for one parameter vector.
struct AdamMoments {
  std::vector<double> m;
  std::vector<double> v;

  friend bool operator==(const AdamMoments&, const AdamMoments&) = default;
};

// One AdamW update (decoupled weight decay, bias-corrected moments) on
// `params` in place. `step` is the 1-based optimizer step count.
void AdamWUpdate(std::span<double> params, std::span<const double> grads,
                 AdamMoments& moments, std::int64_t step, const AdamWStep& hp);

// Scales `grads` so that its L2 norm is at most max_norm. Returns the norm
// before clipping.
double ClipGradNorm(std::span<double> grads, double max_norm);

// Linear warmup over warmup_steps followed by cosine decay to zero at
// total_steps; `step` is 0-based, so the first update has factor 0 when
// warmup_steps > 0.
double CosineWithWarmup(int step, int warmup_steps, int total_steps);

}  // namespace ttscale

#endif  // TTSCALE_OPTIM_H_
