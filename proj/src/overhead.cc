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

#include "ttscale/overhead.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "ttscale/decoder.h"

namespace ttscale {
namespace {

std::string BenchPrompt(int i) { return "benchmark prompt " + std::to_string(i); }

bool SameOutput(const GenerationTrace& a, const GenerationTrace& b) {
  return a.tokens == b.tokens && a.token_logprobs == b.token_logprobs;
}

}  // namespace

std::optional<std::uint64_t> PeakResidentBytes() {
  std::ifstream status("/proc/self/status");
  for (std::string line; std::getline(status, line);) {
    if (line.rfind("VmHWM:", 0) != 0) continue;
    std::istringstream fields(line.substr(6));
    std::uint64_t kib = 0;
    if (fields >> kib) return kib * 1024;
  }
  return std::nullopt;
}

bool ResetPeakResident() {
  std::ofstream clear("/proc/self/clear_refs");
  if (!clear) return false;
  clear << "5";
  return static_cast<bool>(clear.flush());
}

ToyModelSpec BenchmarkModelSpec(int max_n, int steps, int work_per_layer) {
  ToyModelSpec spec;
  const int vocab = steps + 2;
  spec.vocab.push_back("<eos>");
  for (int v = 1; v < vocab; ++v) spec.vocab.push_back("t" + std::to_string(v));
  spec.num_layers = 4;
  spec.hidden_dim = 64;
  spec.layer_seed = 7;
  spec.work_per_layer = work_per_layer;
  spec.trainable = false;
  for (int i = 0; i < max_n; ++i) {
    TokenSequence prefix;
    for (int t = 0; t <= steps; ++t) {
      const TokenId next = t < steps ? t + 1 : 0;
      std::vector<double> probs(static_cast<size_t>(vocab), 0.2 / (vocab - 1));
      probs[static_cast<size_t>(next)] = 0.8;
      spec.Set(BenchPrompt(i), std::nullopt, prefix, probs);
      prefix.push_back(next);
    }
  }
  return spec;
}

std::vector<AugmentedInput> BenchmarkInputs(int n) {
  std::vector<AugmentedInput> out;
  for (int i = 0; i < n; ++i) {
    AugmentedInput in;
    in.prompt = BenchPrompt(i);
    in.origin_id = "bench";
    in.variant_index = i;
    out.push_back(std::move(in));
  }
  return out;
}

OverheadResult BenchOverhead(Generator& g, std::span<const AugmentedInput> inputs,
                             const std::vector<int>& n_list,
                             const std::vector<ExecutionMode>& modes,
                             int repeats, const GenerationConfig& cfg) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  OverheadResult result;
  for (int n : n_list) {
    if (n < 1 || static_cast<size_t>(n) > inputs.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "n_aug " + std::to_string(n) + " outside [1, inputs]");
    }
    std::optional<GenerationTrace> reference;
    for (ExecutionMode mode : modes) {
      GenerationConfig run = cfg;
      run.n_aug = n;
      run.execution = mode;
      run.layer = kFinalLayer;
      ResetPeakResident();
      std::vector<double> times;
      for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        GenerationTrace trace = TtaugGenerate(g, inputs.first(static_cast<size_t>(n)), run);
        times.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        if (!reference) {
          reference = std::move(trace);
        } else if (!SameOutput(*reference, trace)) {
          result.traces_identical = false;
        }
      }
      std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
      OverheadReport report;
      report.n_aug = n;
      report.mode = mode;
      report.wall_time_s_per_query = times[times.size() / 2];
      report.peak_memory_bytes = PeakResidentBytes().value_or(0);
      result.reports.push_back(report);
    }
  }
  return result;
}

void WriteOverheadCsv(std::ostream& out,
                      const std::vector<OverheadReport>& reports) {
  out << "n_aug,mode,peak_memory_bytes,wall_time_s_per_query\n"
      << std::setprecision(9);
  for (const OverheadReport& r : reports) {
    out << r.n_aug << ',' << ToString(r.mode) << ',' << r.peak_memory_bytes
        << ',' << r.wall_time_s_per_query << '\n';
  }
}

}  // namespace ttscale
