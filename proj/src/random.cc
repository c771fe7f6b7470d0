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

#include "ttscale/random.h"

#include <cmath>
#include <numbers>

namespace ttscale {

double SeededRng::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::Uniform(double lo, double hi) {
  return lo + (hi - lo) * Uniform01();
}

int SeededRng::UniformInt(int lo, int hi) {
  return lo + static_cast<int>(Index(static_cast<std::size_t>(hi - lo) + 1));
}

std::size_t SeededRng::Index(std::size_t n) {
  // Rejection sampling keeps the draw unbiased for every n.
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

bool SeededRng::Bernoulli(double p) { return Uniform01() < p; }

double SeededRng::Normal(double mean, double stddev) {
  // Box-Muller; one of the pair is discarded so each call consumes exactly
  // two draws.
  double u1 = Uniform01();
  const double u2 = Uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

StableHasher& StableHasher::Update(const std::uint8_t* data, std::size_t size) {
  for (std::size_t i = 0; i < size; ++i) {
    state_ ^= data[i];
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

StableHasher& StableHasher::Update(std::string_view bytes) {
  return Update(reinterpret_cast<const std::uint8_t*>(bytes.data()),
                bytes.size());
}

StableHasher& StableHasher::UpdateU64(std::uint64_t value) {
  std::uint8_t bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(value >> (8 * i));
  return Update(bytes, 8);
}

std::uint64_t StableHash(std::string_view bytes) {
  return StableHasher().Update(bytes).digest();
}

}  // namespace ttscale
