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

#include "ttscale/optim.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ttscale {

void AdamWUpdate(std::span<double> params, std::span<const double> grads,
                 AdamMoments& moments, std::int64_t step, const AdamWStep& hp) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "params/grads size mismatch");
  }
  if (moments.m.size() != params.size()) {
    moments.m.assign(params.size(), 0.0);
    moments.v.assign(params.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(step));
  for (size_t i = 0; i < params.size(); ++i) {
    params[i] *= 1.0 - hp.learning_rate * hp.weight_decay;
    moments.m[i] = hp.beta1 * moments.m[i] + (1.0 - hp.beta1) * grads[i];
    moments.v[i] =
        hp.beta2 * moments.v[i] + (1.0 - hp.beta2) * grads[i] * grads[i];
    const double m_hat = moments.m[i] / bc1;
    const double v_hat = moments.v[i] / bc2;
    params[i] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
  }
}

double ClipGradNorm(std::span<double> grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / (norm + 1e-6);
    for (double& g : grads) g *= scale;
  }
  return norm;
}

double CosineWithWarmup(int step, int warmup_steps, int total_steps) {
  if (step < warmup_steps) {
    return static_cast<double>(step) / std::max(1, warmup_steps);
  }
  const double progress = static_cast<double>(step - warmup_steps) /
                          std::max(1, total_steps - warmup_steps);
  return std::max(0.0, 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

}  // namespace ttscale
