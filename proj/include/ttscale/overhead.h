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

#ifndef TTSCALE_OVERHEAD_H_
#define TTSCALE_OVERHEAD_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/generator.h"
#include "ttscale/toy_model.h"

namespace ttscale {

struct OverheadReport {
  int n_aug = 1;
  ExecutionMode mode = ExecutionMode::kSequential;
  std::uint64_t peak_memory_bytes = 0;
  double wall_time_s_per_query = 0.0;
};

struct OverheadResult {
  std::vector<OverheadReport> reports;
  // Token sequences and log-probabilities agree across modes for every N.
  bool traces_identical = true;
};

// Process resident-set high-water mark (VmHWM), if the platform reports it.
std::optional<std::uint64_t> PeakResidentBytes();
// Restarts the high-water mark from the current RSS; false if unsupported.
bool ResetPeakResident();

// Toy model whose queries burn `work_per_layer` dense products per layer and
// whose decodes run `steps` tokens before EOS for every benchmark prompt.
ToyModelSpec BenchmarkModelSpec(int max_n = 16, int steps = 8,
                                int work_per_layer = 16);
std::vector<AugmentedInput> BenchmarkInputs(int n);

// For every N in n_list and every mode: `repeats` TTAug queries over the
// first N inputs; the median wall time and the peak RSS are reported.
OverheadResult BenchOverhead(Generator& g, std::span<const AugmentedInput> inputs,
                             const std::vector<int>& n_list,
                             const std::vector<ExecutionMode>& modes,
                             int repeats, const GenerationConfig& cfg);

// "n_aug,mode,peak_memory_bytes,wall_time_s_per_query".
void WriteOverheadCsv(std::ostream& out,
                      const std::vector<OverheadReport>& reports);

}  // namespace ttscale

#endif  // TTSCALE_OVERHEAD_H_
